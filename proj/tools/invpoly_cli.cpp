// invpoly: command-line driver for invertible polynomial computations.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invpoly/presets.hpp"
#include "invpoly/report.hpp"

namespace {

struct InputOptions {
  std::string polynomial;
  std::string json_matrix;
  std::string preset;
};

struct OutputOptions {
  std::string format = "json";
  std::string out;
  bool no_timings = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invpoly::Error(invpoly::ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

invpoly::InvertiblePolynomial load(const InputOptions& in) {
  const int given = !in.polynomial.empty() + !in.json_matrix.empty() + !in.preset.empty();
  if (given != 1)
    throw invpoly::Error(invpoly::ErrorKind::InvalidArgument,
                         "give exactly one of POLYNOMIAL, --json-matrix FILE, --preset NAME");
  if (!in.preset.empty()) return invpoly::presets::by_name(in.preset);
  if (!in.json_matrix.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(in.json_matrix));
    } catch (const nlohmann::json::parse_error& e) {
      throw invpoly::Error(invpoly::ErrorKind::SyntaxError, std::string("JSON: ") + e.what());
    }
    return invpoly::from_json(j);
  }
  return invpoly::parse(in.polynomial);
}

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("polynomial", in.polynomial, "polynomial such as \"x1^2*x2 + x2^3\"");
  cmd->add_option("--json-matrix", in.json_matrix, "JSON file {\"matrix\": [[...], ...]}");
  cmd->add_option("--preset", in.preset, "named polynomial")
      ->check(CLI::IsMember([] {
        std::vector<std::string> names;
        for (const auto& [k, v] : invpoly::presets::all()) names.push_back(k);
        return names;
      }()));
}

void add_output(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--format", out.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--out", out.out, "write output to FILE instead of stdout");
  cmd->add_flag("--no-timings", out.no_timings, "omit wall-clock timings from JSON");
}

void emit(const invpoly::RunReport& r, const OutputOptions& o) {
  std::string body;
  if (o.format == "json")
    body = r.to_json(!o.no_timings).dump(2) + "\n";
  else if (o.format == "csv")
    body = r.csv;
  else
    body = r.text;
  if (o.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw invpoly::Error(invpoly::ErrorKind::InvalidArgument, "cannot write " + o.out);
  f << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry groups, line bundle Ext tables, Chen-Ruan dimensions and exceptional collection\n"
               "searches for invertible polynomials."};
  app.set_version_flag("--version", INVPOLY_VERSION);
  app.require_subcommand(1);

  InputOptions in;
  OutputOptions out;
  std::uint64_t seed = 20261015;

  auto* analyze = app.add_subcommand("analyze", "weights, atomic type, G_w, J_w cap G_w, Gbar_w, characters");
  int random_loops = 0;
  add_input(analyze, in);
  add_output(analyze, out);
  analyze->add_option("--random-loops", random_loops, "also cross-check N random loops (formula vs SNF)");
  analyze->add_option("--seed", seed, "seed for --random-loops");

  auto* table = app.add_subcommand("table", "Hom(O, O(a,b)) dimensions and representative monomials");
  std::int64_t max_a = 3;
  add_input(table, in);
  add_output(table, out);
  table->add_option("--max-a", max_a, "largest degree a")->check(CLI::NonNegativeNumber);

  auto* chen = app.add_subcommand("chen-ruan", "twisted sectors and dim H*_CR");
  add_input(chen, in);
  add_output(chen, out);

  auto* search = app.add_subcommand("search", "exact maximum exceptional collection of line bundles");
  invpoly::SearchConfig cfg;
  std::optional<std::int64_t> window_max_a;
  double timeout_secs = 600;
  std::string window_rule = "layer-cutoff";
  std::string dot_file;
  add_input(search, in);
  add_output(search, out);
  search->add_option("--window-max-a", window_max_a, "cap the candidate window at this a");
  search->add_option("--window-rule", window_rule, "layer-cutoff or two-cycle")
      ->check(CLI::IsMember({"layer-cutoff", "two-cycle"}));
  search->add_option("--timeout-secs", timeout_secs, "search budget in seconds")->check(CLI::NonNegativeNumber);
  search->add_option("--threads", cfg.threads, "worker threads (ignored with --deterministic)");
  search->add_flag("--deterministic,!--no-deterministic", cfg.deterministic,
                   "single-threaded search with a reproducible witness (default on)");
  search->add_option("--lower-bound-hint", cfg.lower_bound_hint, "known achievable size");
  search->add_option("--dot", dot_file, "write the Hom digraph of the window as DOT");
  search->add_option("--seed", seed, "recorded for reproducibility");

  auto* verify = app.add_subcommand("verify", "check an ordered collection given as a JSON list of [a, b]");
  std::string collection_file;
  add_input(verify, in);
  add_output(verify, out);
  verify->add_option("--collection", collection_file, "JSON file with the collection")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto poly = load(in);
    invpoly::RunReport report;
    if (*analyze) {
      report = invpoly::analyze_report(poly, random_loops, seed);
    } else if (*table) {
      report = invpoly::table_report(poly, max_a);
    } else if (*chen) {
      report = invpoly::chen_ruan_run(poly);
    } else if (*search) {
      cfg.window_max_a = window_max_a;
      cfg.rule = window_rule == "two-cycle" ? invpoly::WindowRule::TwoCycleWithOrigin : invpoly::WindowRule::LayerCutoff;
      cfg.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_secs * 1000));
      std::string dot;
      report = invpoly::search_report(poly, cfg, dot_file.empty() ? nullptr : &dot);
      report.parameters["seed"] = seed;
      if (!dot_file.empty()) {
        std::ofstream f(dot_file);
        f << dot;
      }
    } else if (*verify) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(collection_file));
      } catch (const nlohmann::json::parse_error& e) {
        throw invpoly::Error(invpoly::ErrorKind::SyntaxError, std::string("JSON: ") + e.what());
      }
      report = invpoly::verify_report(poly, j);
    }
    emit(report, out);
    return report.exit_code;
  } catch (const invpoly::Error& e) {
    nlohmann::json err{{"error", std::string(invpoly::to_string(e.kind()))}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return invpoly::kValidationError;
  }
}
