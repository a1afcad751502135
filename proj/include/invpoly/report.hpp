#pragma once

// Subcommand drivers shared by the command-line tool and the tests. Each
// returns a RunReport carrying JSON results plus CSV and text renderings.

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invpoly/chen_ruan.hpp"
#include "invpoly/errors.hpp"
#include "invpoly/exceptional_search.hpp"
#include "invpoly/graded_homs.hpp"
#include "invpoly/invertible_poly.hpp"
#include "invpoly/symmetry.hpp"

#ifndef INVPOLY_VERSION
#define INVPOLY_VERSION "0.0.0"
#endif

namespace invpoly {

enum ExitCode : int { kOk = 0, kValidationError = 1, kTimeout = 2 };

struct RunReport {
  RunReport() = default;
  RunReport(std::string sub, std::string poly) : subcommand(std::move(sub)), polynomial(std::move(poly)) {}

  std::string subcommand;
  std::string polynomial;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::pair<std::string, double>> timings;
  std::string csv;
  std::string text;
  int exit_code = kOk;

  nlohmann::json to_json(bool with_timings = true) const {
    nlohmann::json j{{"tool", "invpoly"},
                     {"version", INVPOLY_VERSION},
                     {"subcommand", subcommand},
                     {"polynomial", polynomial},
                     {"parameters", parameters},
                     {"results", results},
                     {"exit_code", exit_code}};
    if (with_timings) {
      auto t = nlohmann::json::object();
      for (const auto& [k, v] : timings) t[k] = v;
      j["timings"] = t;
    }
    return j;
  }
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline nlohmann::json ints(const std::vector<Integer>& v) {
  auto a = nlohmann::json::array();
  for (const auto& x : v) a.push_back(x.convert_to<long long>());
  return a;
}

// Coefficients of prod_i 1/(1 - t^{q_i}) up to t^max_a.
inline std::vector<std::int64_t> weighted_partition_counts(const std::vector<std::int64_t>& q, std::int64_t max_a) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(max_a + 1), 0);
  c[0] = 1;
  for (auto w : q)
    for (std::int64_t a = w; a <= max_a; ++a) c[a] += c[a - w];
  return c;
}

// Formula generator versus SNF group for each loop block.
inline nlohmann::json loop_checks(const AtomicDecomposition& dec) {
  auto out = nlohmann::json::array();
  for (const auto& blk : dec.blocks) {
    if (blk.kind != BlockKind::Loop) continue;
    nlohmann::json entry{{"block", to_string(blk)}};
    try {
      auto phi = loop_generator_formula(blk.exponents);
      std::vector<DiagonalElement> gens{phi};
      auto spanned = generated_subgroup(gens, blk.exponents.size());
      entry["agrees"] = spanned == diagonal_symmetries(loop_matrix(blk.exponents)).elements();
      entry["formula_generator"] = phi.to_json();
    } catch (const Error& e) {
      entry["agrees"] = nullptr;
      entry["error"] = e.what();
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace detail

/// Weights, atomic type, and the groups G_w, J_w cap G_w, Gbar_w.
inline RunReport analyze_report(const InvertiblePolynomial& p, int random_loops = 0, std::uint64_t seed = 20261015) {
  detail::Stopwatch sw;
  RunReport r{"analyze", p.to_string()};
  r.parameters = {{"random_loops", random_loops}, {"seed", seed}};
  auto dec = atomic_decomposition(p);
  auto gs = gamma_structure(p);
  r.results = {{"n", p.n()},
               {"matrix", p.matrix_json()},
               {"q", detail::ints(p.q())},
               {"d", p.d().convert_to<long long>()},
               {"det", p.det().convert_to<long long>()},
               {"atomic_type", to_string(dec)},
               {"symmetry", to_json(gs)},
               {"loop_formula", detail::loop_checks(dec)}};
  if (random_loops > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(2, 6), ex(1, 4);
    auto checks = nlohmann::json::array();
    while (static_cast<int>(checks.size()) < random_loops) {
      std::vector<Integer> a(static_cast<std::size_t>(len(rng)));
      for (auto& x : a) x = ex(rng);
      std::optional<InvertiblePolynomial> lp;
      try {
        lp = loop_polynomial(a);
      } catch (const Error&) {
        continue;
      }
      auto c = detail::loop_checks(atomic_decomposition(*lp));
      if (c.empty() || c[0]["agrees"].is_null()) continue;
      checks.push_back({{"polynomial", lp->to_string()}, {"agrees", c[0]["agrees"]}});
    }
    r.results["random_loop_checks"] = checks;
  }
  r.timings.emplace_back("analyze", sw.lap());

  std::ostringstream t;
  t << "polynomial: " << p.to_string() << "\n";
  t << "atomic type: " << to_string(dec) << "\n";
  t << "weights q = " << r.results["q"].dump() << ", degree d = " << r.results["d"] << "\n";
  t << "|G_w| = " << gs.gw.order() << ", invariant factors " << detail::ints(gs.gw.invariant_factors).dump() << "\n";
  t << "|J_w cap G_w| = " << gs.jw_cap_gw.order() << "\n";
  t << "|Gbar_w| = " << gs.gbar.order() << ", invariant factors " << detail::ints(gs.gbar.invariant_factors).dump()
    << "\n";
  for (std::size_t k = 0; k < gs.gbar.generators.size(); ++k)
    t << "  generator " << k + 1 << ": " << gs.gbar.generators[k].to_string() << "\n";
  t << "splitting b = " << detail::ints(gs.b).dump() << "\n";
  t << "characters c = " << nlohmann::json(gs.characters).dump() << "\n";
  r.text = t.str();

  std::ostringstream c;
  c << "variable,q,character\n";
  for (std::size_t i = 0; i < p.n(); ++i) {
    c << "x" << i + 1 << "," << gs.weight(i) << ",";
    for (std::size_t k = 0; k < gs.rank(); ++k) c << (k ? ":" : "") << gs.characters[i][k];
    c << "\n";
  }
  r.csv = c.str();
  return r;
}

/// Hom(O, O(a, b)) dimensions and representative monomials for 0 <= a <= max_a.
inline RunReport table_report(const InvertiblePolynomial& p, std::int64_t max_a) {
  if (max_a < 0) throw Error(ErrorKind::InvalidArgument, "max_a must be nonnegative");
  detail::Stopwatch sw;
  RunReport r{"table", p.to_string()};
  r.parameters = {{"max_a", max_a}};
  auto gs = gamma_structure(p);
  BigradedRing ring(gs);
  auto cells = table1(ring, max_a);
  const auto chars = ring.all_characters();

  auto dims = nlohmann::json::array(), reps = nlohmann::json::array(), hilbert = nlohmann::json::array();
  auto series = detail::weighted_partition_counts(ring.weights(), max_a);
  bool hilbert_ok = true;
  std::size_t i = 0;
  for (std::int64_t a = 0; a <= max_a; ++a) {
    auto drow = nlohmann::json::array(), rrow = nlohmann::json::array();
    std::int64_t sum = 0;
    for (std::size_t c = 0; c < chars.size(); ++c, ++i) {
      drow.push_back(cells[i].hom_dim);
      rrow.push_back(cells[i].representative ? monomial_string(*cells[i].representative) : "");
      sum += cells[i].hom_dim;
    }
    std::int64_t expected = series[a] - (a >= ring.degree() ? series[a - ring.degree()] : 0);
    hilbert_ok = hilbert_ok && sum == expected;
    hilbert.push_back({{"a", a}, {"sum", sum}, {"expected", expected}});
    dims.push_back(drow);
    reps.push_back(rrow);
  }
  auto labels = nlohmann::json::array();
  for (const auto& b : chars) labels.push_back(b);
  r.results = {{"characters", labels},     {"hom_dims", dims},          {"representatives", reps},
               {"hilbert_rows", hilbert}, {"hilbert_ok", hilbert_ok}};
  r.timings.emplace_back("table", sw.lap());
  r.csv = hom_table_csv(ring, max_a) + "\n" + table1_csv(ring, max_a);

  std::ostringstream t;
  t << "Hom(O, O(a,b)) for " << p.to_string() << "\n";
  t << hom_table_csv(ring, max_a) << "\nrepresentatives\n" << table1_csv(ring, max_a);
  t << "Hilbert function check: " << (hilbert_ok ? "ok" : "MISMATCH") << "\n";
  r.text = t.str();
  if (!hilbert_ok) r.exit_code = kValidationError;
  return r;
}

/// Twisted sectors and the total Chen-Ruan dimension.
inline RunReport chen_ruan_run(const InvertiblePolynomial& p) {
  detail::Stopwatch sw;
  RunReport r{"chen-ruan", p.to_string()};
  auto gs = gamma_structure(p);
  r.results = chen_ruan_report(gs);
  r.timings.emplace_back("chen_ruan", sw.lap());

  std::ostringstream c;
  c << "word,phases,fixed_coords,contribution\n";
  for (const auto& s : r.results["contributing_sectors"]) {
    std::string word, fixed;
    for (const auto& w : s["word"]) word += (word.empty() ? "" : ":") + w.dump();
    for (const auto& f : s["fixed_coords"]) fixed += (fixed.empty() ? "" : ":") + f.dump();
    c << word << ",\"" << s["phases"].dump() << "\"," << fixed << "," << s["contribution"] << "\n";
  }
  r.csv = c.str();

  std::ostringstream t;
  t << "untwisted invariant classes: " << r.results["untwisted"] << " (h^{2,1} = " << r.results["h21"]
    << " before invariants)\n";
  t << "sector group order: " << r.results["sector_group_order"] << "\n";
  t << "contributing twisted sectors: " << r.results["twisted"] << "\n";
  t << "dim H*_CR = " << r.results["untwisted"] << " + " << r.results["twisted"] << " = " << r.results["total"] << "\n";
  r.text = t.str();
  return r;
}

struct SearchConfig {
  WindowRule rule = WindowRule::LayerCutoff;
  std::optional<std::int64_t> window_max_a;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
  unsigned threads = 1;
  bool deterministic = true;
  std::int64_t lower_bound_hint = 0;
};

inline std::string headline(std::int64_t size, bool optimal, std::optional<std::int64_t> required) {
  std::ostringstream os;
  if (!optimal) {
    os << "largest line-bundle exceptional collection found = " << size << " (search timed out; not certified)";
  } else if (!required) {
    os << "maximum line-bundle exceptional collection = " << size;
  } else {
    os << "maximum line-bundle exceptional collection = " << size << (size < *required ? " < " : " >= ") << *required
       << " = required full-collection length";
  }
  return os.str();
}

/// Window, exact maximum, witness, proof log and the comparison with the
/// Chen-Ruan dimension.
inline RunReport search_report(const InvertiblePolynomial& p, const SearchConfig& cfg,
                               std::string* dot_out = nullptr) {
  detail::Stopwatch sw;
  RunReport r{"search", p.to_string()};
  r.parameters = {{"window_rule", to_string(cfg.rule)},
                  {"window_max_a", cfg.window_max_a ? nlohmann::json(*cfg.window_max_a) : nlohmann::json(nullptr)},
                  {"timeout_secs", cfg.timeout.count() / 1000.0},
                  {"threads", cfg.threads},
                  {"deterministic", cfg.deterministic},
                  {"lower_bound_hint", cfg.lower_bound_hint}};
  auto gs = gamma_structure(p);
  ExtCalculator calc(gs);
  auto window = candidate_window(calc, cfg.rule, cfg.window_max_a);
  HomDigraph g(calc, window.vertices);
  if (dot_out) *dot_out = g.to_dot();
  r.timings.emplace_back("window", sw.lap());

  auto greedy = greedy_collection(g, calc.ring().zero());
  SearchOptions opt;
  opt.timeout = cfg.timeout;
  opt.threads = cfg.threads;
  opt.deterministic = cfg.deterministic;
  opt.lower_bound_hint = std::max<std::int64_t>(cfg.lower_bound_hint, static_cast<std::int64_t>(greedy.size()));
  auto res = max_exceptional(g, opt);
  r.timings.emplace_back("search", sw.lap());

  std::optional<std::int64_t> required;
  try {
    required = chen_ruan_dim(gs);
  } catch (const Error& e) {
    r.results["chen_ruan_error"] = e.what();
  }
  r.timings.emplace_back("chen_ruan", sw.lap());

  auto verts = nlohmann::json::array();
  for (const auto& v : window.vertices) verts.push_back(v.to_json());
  r.results["window"] = {{"rule", to_string(cfg.rule)},
                         {"vertices", verts},
                         {"size", window.vertices.size()},
                         {"full_row", window.full_row},
                         {"max_layer", window.max_layer},
                         {"proof_log", window.proof_log}};
  r.results["greedy_size"] = greedy.size();
  r.results["search"] = res.to_json();
  r.results["maximum"] = res.size;
  r.results["optimal"] = res.optimal;
  r.results["required_length"] = required ? nlohmann::json(*required) : nlohmann::json(nullptr);
  r.results["full_collection_of_line_bundles_possible"] =
      (required && res.optimal) ? nlohmann::json(res.size >= *required) : nlohmann::json(nullptr);
  r.results["verdict"] = headline(res.size, res.optimal, required);
  if (!res.optimal) r.exit_code = kTimeout;

  std::ostringstream c;
  c << "position,a,b\n";
  for (std::size_t i = 0; i < res.witness.order.size(); ++i) {
    const auto& d = res.witness.order[i];
    c << i << "," << d.a << ",";
    for (std::size_t k = 0; k < d.b.size(); ++k) c << (k ? ":" : "") << d.b[k];
    c << "\n";
  }
  r.csv = c.str();

  std::ostringstream t;
  for (const auto& line : window.proof_log) t << line << "\n";
  for (const auto& line : res.proof_log) t << line << "\n";
  t << "witness (" << res.witness.order.size() << " objects, exceptional order):";
  for (const auto& d : res.witness.order) t << " O" << d.to_string();
  t << "\n" << r.results["verdict"].get<std::string>() << "\n";
  r.text = t.str();
  return r;
}

/// Certificate for a user-supplied ordered collection.
inline RunReport verify_report(const InvertiblePolynomial& p, const nlohmann::json& collection) {
  detail::Stopwatch sw;
  RunReport r{"verify", p.to_string()};
  auto gs = gamma_structure(p);
  ExtCalculator calc(gs);
  auto order = collection_from_json(calc.ring(), collection);
  r.parameters = {{"collection", collection_to_json(order)}};
  auto cert = verify_collection(calc, order);
  r.results = cert.to_json();
  r.timings.emplace_back("verify", sw.lap());
  if (!cert.valid()) r.exit_code = kValidationError;

  std::ostringstream t;
  if (cert.valid()) {
    t << "valid exceptional collection of " << order.size() << " line bundles\n";
  } else {
    const auto& v = *cert.violation;
    t << "violation: Ext^*(O" << v.from.to_string() << ", O" << v.to.to_string() << ") = "
      << nlohmann::json(v.ext).dump() << " with O" << v.from.to_string() << " at position " << v.later
      << " after position " << v.earlier << "\n";
  }
  r.text = t.str();
  std::ostringstream c;
  c << "status,size\n" << (cert.valid() ? "valid" : "violation") << "," << order.size() << "\n";
  r.csv = c.str();
  return r;
}

}  // namespace invpoly
