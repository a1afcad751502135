#include <gtest/gtest.h>

#include "invpoly/presets.hpp"
#include "invpoly/report.hpp"

using namespace invpoly;

namespace {

nlohmann::json pairs(const std::vector<std::pair<std::int64_t, std::int64_t>>& xs) {
  auto j = nlohmann::json::array();
  for (auto [a, b] : xs) j.push_back({a, b});
  return j;
}

}  // namespace

TEST(Report, AnalyzeCubicLoop) {
  auto r = analyze_report(presets::lu_counterexample());
  const auto& s = r.results["symmetry"];
  EXPECT_EQ(s["G_w"]["order"], 33);
  EXPECT_EQ(s["J_w_cap_G_w"]["order"], 3);
  EXPECT_EQ(s["Gbar_w"]["order"], 11);
  EXPECT_EQ(s["characters"], nlohmann::json({{1}, {9}, {4}, {3}, {5}}));
  EXPECT_EQ(r.results["atomic_type"], "Loop(2,2,2,2,2)");
  EXPECT_EQ(r.results["loop_formula"][0]["agrees"], true);
  EXPECT_EQ(r.exit_code, kOk);
}

TEST(Report, AnalyzeFermatHasTrivialQuotient) {
  auto r = analyze_report(parse("x1^3"));
  EXPECT_EQ(r.results["symmetry"]["Gbar_w"]["order"], 1);
}

TEST(Report, AnalyzeRandomLoopsAgree) {
  auto r = analyze_report(presets::lu_counterexample(), 20, 7);
  ASSERT_EQ(r.results["random_loop_checks"].size(), 20u);
  for (const auto& c : r.results["random_loop_checks"]) EXPECT_EQ(c["agrees"], true) << c.dump();
  EXPECT_EQ(analyze_report(presets::lu_counterexample(), 20, 7).to_json(false), r.to_json(false));
}

TEST(Report, TableMatchesPattern) {
  auto r = table_report(presets::lu_counterexample(), 3);
  EXPECT_EQ(r.results["hilbert_ok"], true);
  const auto& reps = r.results["representatives"];
  EXPECT_EQ(reps[3][0], "x1^2*x2");
  EXPECT_EQ(reps[1][2], "");
  EXPECT_EQ(r.results["hom_dims"][0], nlohmann::json({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(Report, TableAtZeroHasOneCell) {
  auto r = table_report(presets::lu_counterexample(), 0);
  int nonempty = 0;
  for (const auto& x : r.results["hom_dims"][0]) nonempty += x.get<int>() > 0;
  EXPECT_EQ(nonempty, 1);
  EXPECT_THROW(table_report(presets::lu_counterexample(), -1), Error);
}

TEST(Report, TableHilbertForWeightedInput) {
  auto r = table_report(parse("x1^2*x2 + x2^3"), 9);
  EXPECT_EQ(r.results["hilbert_ok"], true);
}

TEST(Report, ChenRuan) {
  auto r = chen_ruan_run(presets::lu_counterexample());
  EXPECT_EQ(r.results["total"], 54);
  EXPECT_EQ(r.results["twisted"], 50);
  EXPECT_NE(r.text.find("4 + 50 = 54"), std::string::npos);
}

TEST(Report, SearchVerdictAndDeterminism) {
  SearchConfig cfg;
  auto r = search_report(presets::lu_counterexample(), cfg);
  EXPECT_EQ(r.results["maximum"], 24);
  EXPECT_EQ(r.results["required_length"], 54);
  EXPECT_EQ(r.results["verdict"], "maximum line-bundle exceptional collection = 24 < 54 = required full-collection length");
  EXPECT_EQ(r.results["full_collection_of_line_bundles_possible"], false);
  EXPECT_EQ(r.results["window"]["size"], 45);
  EXPECT_EQ(r.exit_code, kOk);
  auto again = search_report(presets::lu_counterexample(), cfg);
  EXPECT_EQ(again.to_json(false).dump(), r.to_json(false).dump());
}

TEST(Report, SearchCappedWindow) {
  SearchConfig cfg;
  cfg.window_max_a = 0;
  auto r = search_report(presets::lu_counterexample(), cfg);
  EXPECT_EQ(r.results["maximum"], 11);
}

TEST(Report, SearchTimeoutExitCode) {
  SearchConfig cfg;
  cfg.timeout = std::chrono::milliseconds(0);
  auto r = search_report(presets::lu_counterexample(), cfg);
  EXPECT_EQ(r.exit_code, kTimeout);
  EXPECT_EQ(r.results["optimal"], false);
}

TEST(Report, VerifyOutcomes) {
  auto ok = verify_report(presets::lu_counterexample(), pairs(presets::lu_sharp_collection()));
  EXPECT_EQ(ok.results["status"], "valid");
  EXPECT_EQ(ok.exit_code, kOk);

  auto bad = verify_report(presets::lu_counterexample(), pairs({{0, 0}, {4, 0}, {2, 0}}));
  EXPECT_EQ(bad.results["status"], "violation");
  EXPECT_EQ(bad.exit_code, kValidationError);
  EXPECT_TRUE(bad.results["violation"].contains("from"));

  auto empty = verify_report(presets::lu_counterexample(), nlohmann::json::array());
  EXPECT_EQ(empty.results["status"], "valid");

  EXPECT_THROW(verify_report(presets::lu_counterexample(), nlohmann::json{{"a", 1}}), Error);
}
