#pragma once

// Exceptional collections of line bundles: the Hom digraph on a finite window
// of bidegrees, collection verification, cycle enumeration, and an exact
// branch-and-bound for the largest subset with acyclic induced digraph.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include "invpoly/errors.hpp"
#include "invpoly/graded_homs.hpp"

namespace invpoly {

using Bits = boost::dynamic_bitset<std::uint64_t>;

/// Directed graph on bidegrees; u -> v iff Hom^*(O(u), O(v)) != 0, u != v.
class HomDigraph {
 public:
  HomDigraph(const ExtCalculator& calc, std::vector<BiDegree> vertices) : calc_(&calc), vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    out_.assign(n, Bits(n));
    in_.assign(n, Bits(n));
    for (std::size_t u = 0; u < n; ++u) {
      if (calc.ext_dims(vertices_[u], vertices_[u]).e != std::vector<std::int64_t>{1, 0, 0, 0})
        throw Error(ErrorKind::InvalidArgument, "line bundle " + vertices_[u].to_string() + " is not exceptional");
      for (std::size_t v = 0; v < n; ++v) {
        if (u == v) continue;
        if (vertices_[u] == vertices_[v]) throw Error(ErrorKind::InvalidArgument, "duplicate vertex " + vertices_[u].to_string());
        if (!calc.ext_dims(vertices_[u], vertices_[v]).vanishes()) {
          out_[u].set(v);
          in_[v].set(u);
        }
      }
    }
  }

  const ExtCalculator& calculator() const { return *calc_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<BiDegree>& vertices() const { return vertices_; }
  const BiDegree& vertex(std::size_t i) const { return vertices_[i]; }
  bool edge(std::size_t u, std::size_t v) const { return out_[u].test(v); }
  const Bits& out(std::size_t u) const { return out_[u]; }
  const Bits& in(std::size_t v) const { return in_[v]; }

  std::optional<std::size_t> index_of(const BiDegree& d) const {
    auto it = std::find(vertices_.begin(), vertices_.end(), d);
    if (it == vertices_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  /// Kahn's algorithm on the induced subgraph, smallest index first.
  /// Empty optional when the subset has a directed cycle.
  std::optional<std::vector<std::size_t>> topological_order(const Bits& subset) const {
    const std::size_t n = size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t v = subset.find_first(); v != Bits::npos; v = subset.find_next(v)) indeg[v] = (in_[v] & subset).count();
    std::set<std::size_t> ready;
    for (std::size_t v = subset.find_first(); v != Bits::npos; v = subset.find_next(v))
      if (indeg[v] == 0) ready.insert(v);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      std::size_t u = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(u);
      Bits succ = out_[u] & subset;
      for (std::size_t v = succ.find_first(); v != Bits::npos; v = succ.find_next(v))
        if (--indeg[v] == 0) ready.insert(v);
    }
    if (order.size() != subset.count()) return std::nullopt;
    return order;
  }

  bool acyclic(const Bits& subset) const { return topological_order(subset).has_value(); }

  Bits all() const {
    Bits b(size());
    b.set();
    return b;
  }

  std::string to_dot() const {
    std::ostringstream os;
    os << "digraph hom {\n";
    for (std::size_t i = 0; i < size(); ++i) os << "  v" << i << " [label=\"O" << vertices_[i].to_string() << "\"];\n";
    for (std::size_t u = 0; u < size(); ++u)
      for (std::size_t v = out_[u].find_first(); v != Bits::npos; v = out_[u].find_next(v))
        os << "  v" << u << " -> v" << v << ";\n";
    os << "}\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    auto verts = nlohmann::json::array();
    for (const auto& v : vertices_) verts.push_back(v.to_json());
    auto edges = nlohmann::json::array();
    for (std::size_t u = 0; u < size(); ++u)
      for (std::size_t v = out_[u].find_first(); v != Bits::npos; v = out_[u].find_next(v))
        edges.push_back({u, v});
    return {{"vertices", verts}, {"edges", edges}};
  }

 private:
  const ExtCalculator* calc_;
  std::vector<BiDegree> vertices_;
  std::vector<Bits> out_, in_;
};

// ---------------------------------------------------------------------------
// Collections.

struct Violation {
  std::size_t earlier = 0, later = 0;  // positions in the order, earlier < later
  BiDegree from, to;                   // nonzero Ext^*(O(from), O(to)) with from later than to
  std::vector<std::int64_t> ext;
  std::vector<std::size_t> degrees;    // i with Ext^i != 0
};

struct CollectionCertificate {
  std::vector<BiDegree> order;
  std::optional<Violation> violation;

  bool valid() const { return !violation.has_value(); }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& d : order) arr.push_back(d.to_json());
    nlohmann::json j{{"collection", arr}, {"size", order.size()}, {"status", valid() ? "valid" : "violation"}};
    if (violation) {
      j["violation"] = {{"positions", {violation->later, violation->earlier}},
                        {"from", violation->from.to_json()},
                        {"to", violation->to.to_json()},
                        {"ext", violation->ext},
                        {"nonzero_degrees", violation->degrees}};
    }
    return j;
  }
};

/// Valid iff every E_i is exceptional and Ext^*(E_j, E_i) = 0 for i < j.
inline CollectionCertificate verify_collection(const ExtCalculator& calc, const std::vector<BiDegree>& order) {
  CollectionCertificate cert{order, std::nullopt};
  auto report = [&](std::size_t i, std::size_t j, const ExtDims& e) {
    Violation v{i, j, order[j], order[i], e.e, {}};
    for (std::size_t k = 0; k < e.e.size(); ++k)
      if (e.e[k] != 0) v.degrees.push_back(k);
    cert.violation = std::move(v);
  };
  for (std::size_t j = 0; j < order.size(); ++j) {
    auto self = calc.ext_dims(order[j], order[j]);
    if (self.e != std::vector<std::int64_t>{1, 0, 0, 0}) {
      report(j, j, self);
      return cert;
    }
    for (std::size_t i = 0; i < j; ++i) {
      auto e = calc.ext_dims(order[j], order[i]);
      if (!e.vanishes()) {
        report(i, j, e);
        return cert;
      }
    }
  }
  return cert;
}

inline nlohmann::json collection_to_json(const std::vector<BiDegree>& c) {
  auto arr = nlohmann::json::array();
  for (const auto& d : c) arr.push_back(d.to_json());
  return arr;
}

inline std::vector<BiDegree> collection_from_json(const BigradedRing& ring, const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "collection must be a JSON list of [a, b] pairs");
  std::vector<BiDegree> out;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != ring.moduli().size() + 1)
      throw Error(ErrorKind::InvalidArgument, "collection entry must be [a, b, ...]: " + item.dump());
    std::vector<std::int64_t> b;
    for (std::size_t k = 1; k < item.size(); ++k) b.push_back(item[k].get<std::int64_t>());
    out.push_back(ring.make(item[0].get<std::int64_t>(), b));
  }
  return out;
}

/// Simple directed cycles with at most max_len vertices, each listed once
/// starting from its smallest vertex index.
inline std::vector<std::vector<BiDegree>> find_cycles(const HomDigraph& g, std::size_t max_len) {
  std::vector<std::vector<BiDegree>> out;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(g.size(), false);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t u) {
    const Bits& succ = g.out(u);
    for (std::size_t v = succ.find_first(); v != Bits::npos; v = succ.find_next(v)) {
      if (v == start && path.size() >= 2) {
        std::vector<BiDegree> cyc;
        for (auto p : path) cyc.push_back(g.vertex(p));
        out.push_back(std::move(cyc));
      } else if (v > start && !on_path[v] && path.size() < max_len) {
        path.push_back(v);
        on_path[v] = true;
        walk(start, v);
        on_path[v] = false;
        path.pop_back();
      }
    }
  };
  for (std::size_t s = 0; s < g.size(); ++s) {
    path = {s};
    on_path[s] = true;
    walk(s, s);
    on_path[s] = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidate window.

enum class WindowRule {
  LayerCutoff,        // layers 0 .. a_full whole, higher layers filtered by 2-cycles with O
  TwoCycleWithOrigin  // every layer filtered by 2-cycles with O
};

struct Window {
  std::vector<BiDegree> vertices;
  std::int64_t full_row = 0;  // first a with Hom(O, O(a, b)) != 0 for all b
  std::int64_t max_layer = 0;
  std::vector<std::string> proof_log;
};

inline std::string to_string(WindowRule r) {
  return r == WindowRule::LayerCutoff ? "layer-cutoff" : "two-cycle";
}

/// Bidegrees that can share a collection with O = O(0, 0) when O has the
/// smallest a. Above full_row + 1 every O(a, b) has Hom from O (a full row
/// stays full after multiplying by any x_i) and Ext^3 to O (Serre), so those
/// layers are dropped.
inline Window candidate_window(const ExtCalculator& calc, WindowRule rule = WindowRule::LayerCutoff,
                               std::optional<std::int64_t> max_a = std::nullopt) {
  const auto& ring = calc.ring();
  const auto chars = ring.all_characters();
  const BiDegree origin = ring.zero();
  Window w;
  auto& log = w.proof_log;

  std::optional<std::int64_t> full;
  const std::int64_t search_limit = 64 * ring.degree() + 64;
  for (std::int64_t a = 0; a <= search_limit && !full; ++a) {
    bool all = true;
    for (const auto& b : chars) all = all && ring.hom_dim(BiDegree{a, b}) > 0;
    if (all) full = a;
  }
  if (!full) throw Error(ErrorKind::UnsupportedGeometry, "no full Hom row found below a = " + std::to_string(search_limit));
  w.full_row = *full;
  // x_i is a nonzerodivisor on S/(w), so row a full implies row a + 1 full.
  log.push_back("normalization: O(0,0) is the member with least a; only a >= 0 is considered");
  log.push_back("first full Hom row: a = " + std::to_string(*full) + "; every row above it is full");
  const auto omega = ring.canonical();
  const std::int64_t serre_shift = -omega.a;
  const std::int64_t cutoff = *full + serre_shift;  // Ext^3(O(a,b), O) != 0 for all b once a >= cutoff
  log.push_back("layers a >= " + std::to_string(cutoff) + " excluded: Hom(O, O(a,b)) != 0 and Ext^3(O(a,b), O) = Hom(O, O(a" +
                std::to_string(omega.a) + ",b))^* != 0 for every b");

  w.max_layer = cutoff - 1;
  if (max_a) w.max_layer = std::min(w.max_layer, *max_a);
  if (max_a && *max_a < cutoff - 1) log.push_back("window capped at a = " + std::to_string(*max_a));

  for (std::int64_t a = 0; a <= w.max_layer; ++a) {
    const bool filter = rule == WindowRule::TwoCycleWithOrigin || a > *full;
    std::vector<std::string> dropped;
    for (const auto& b : chars) {
      BiDegree d{a, b};
      if (filter && d != origin) {
        auto fwd = calc.ext_dims(origin, d), back = calc.ext_dims(d, origin);
        if (!fwd.vanishes() && !back.vanishes()) {
          std::ostringstream os;
          os << "O" << d.to_string() << " excluded: Hom^*(O, -) total " << fwd.total() << ", Hom^*(-, O) total "
             << back.total() << " (2-cycle with O)";
          dropped.push_back(os.str());
          continue;
        }
      }
      w.vertices.push_back(std::move(d));
    }
    std::ostringstream os;
    os << "layer a = " << a << ": " << (chars.size() - dropped.size()) << " of " << chars.size() << " kept"
       << (filter ? "" : " (unfiltered)");
    log.push_back(os.str());
    for (auto& s : dropped) log.push_back("  " + s);
  }
  log.push_back("window (" + to_string(rule) + "): " + std::to_string(w.vertices.size()) + " vertices");
  return w;
}

// ---------------------------------------------------------------------------
// Maximum acyclic induced subgraph containing a forced vertex.

struct SearchOptions {
  std::int64_t lower_bound_hint = 0;
  std::chrono::milliseconds timeout{std::chrono::minutes(10)};
  unsigned threads = 1;
  bool deterministic = true;
  bool layer_bound = true;         // off: prune by candidate count only
  std::optional<BiDegree> forced;  // defaults to O(0, 0)
};

struct SearchResult {
  std::int64_t size = 0;
  CollectionCertificate witness;
  bool optimal = false;
  std::uint64_t nodes = 0;
  double seconds = 0;
  std::vector<std::string> proof_log;

  nlohmann::json to_json() const {
    return {{"size", size},     {"optimal", optimal}, {"witness", witness.to_json()},
            {"nodes", nodes},   {"proof_log", proof_log}};
  }
};

namespace detail {

// Upper bound on an acyclic subset of a vertex set, as a sum over blocks. A
// block is a single a-layer (bounded by its size) or a pair of layers in
// which every quadruple {(a,b),(a,b'),(a',b),(a',b')} contains a cycle, so at
// most one character is shared between the two layers.
class LayerBound {
 public:
  LayerBound(const HomDigraph& g, std::vector<std::string>& log, bool enabled = true) {
    if (!enabled) {
      log.push_back("bound: candidate count only");
      return;
    }
    const std::size_t n = g.size();
    const auto& ring = g.calculator().ring();
    std::map<std::int64_t, std::vector<std::size_t>> layers;
    for (std::size_t v = 0; v < n; ++v) layers[g.vertex(v).a].push_back(v);
    char_index_.resize(n);
    for (std::size_t v = 0; v < n; ++v) char_index_[v] = ring.flatten(g.vertex(v).b);
    chars_ = ring.character_count();

    std::set<std::int64_t> used;
    for (const auto& [a, verts] : layers) {
      if (used.count(a)) continue;
      used.insert(a);
      std::optional<std::int64_t> partner;
      for (const auto& [a2, verts2] : layers) {
        if (a2 <= a || used.count(a2)) continue;
        if (quadruples_cyclic(g, verts, verts2)) {
          partner = a2;
          break;
        }
      }
      Block blk;
      blk.first = mask(n, verts);
      if (partner) {
        used.insert(*partner);
        blk.second = mask(n, layers[*partner]);
        blk.paired = true;
        log.push_back("bound block: layers " + std::to_string(a) + " and " + std::to_string(*partner) +
                      " paired (every shared-character quadruple contains a cycle)");
      } else {
        log.push_back("bound block: layer " + std::to_string(a) + " alone");
      }
      blocks_.push_back(std::move(blk));
    }
  }

  std::size_t operator()(const Bits& vs) const {
    if (blocks_.empty()) return vs.count();
    std::size_t total = 0;
    for (const auto& blk : blocks_) {
      Bits x = vs & blk.first;
      if (!blk.paired) {
        total += x.count();
        continue;
      }
      Bits y = vs & blk.second;
      Bits bx(chars_), by(chars_);
      for (std::size_t v = x.find_first(); v != Bits::npos; v = x.find_next(v)) bx.set(char_index_[v]);
      for (std::size_t v = y.find_first(); v != Bits::npos; v = y.find_next(v)) by.set(char_index_[v]);
      total += (bx | by).count() + ((bx & by).any() ? 1 : 0);
    }
    return total;
  }

 private:
  struct Block {
    Bits first, second;
    bool paired = false;
  };

  static Bits mask(std::size_t n, const std::vector<std::size_t>& vs) {
    Bits b(n);
    for (auto v : vs) b.set(v);
    return b;
  }

  static bool quadruples_cyclic(const HomDigraph& g, const std::vector<std::size_t>& lo,
                                const std::vector<std::size_t>& hi) {
    std::map<std::vector<std::int64_t>, std::size_t> lo_by_b, hi_by_b;
    for (auto v : lo) lo_by_b[g.vertex(v).b] = v;
    for (auto v : hi) hi_by_b[g.vertex(v).b] = v;
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    for (const auto& [b, v] : lo_by_b) {
      auto it = hi_by_b.find(b);
      if (it != hi_by_b.end()) shared.emplace_back(v, it->second);
    }
    if (shared.size() < 2) return false;
    for (std::size_t i = 0; i < shared.size(); ++i)
      for (std::size_t j = i + 1; j < shared.size(); ++j) {
        Bits q(g.size());
        q.set(shared[i].first).set(shared[i].second).set(shared[j].first).set(shared[j].second);
        if (g.acyclic(q)) return false;
      }
    return true;
  }

  std::vector<std::size_t> char_index_;
  std::size_t chars_ = 0;
  std::vector<Block> blocks_;
};

struct Node {
  Bits chosen;
  std::vector<Bits> reach;  // reach[v] for chosen v: chosen vertices reachable from v, v included
  std::vector<std::size_t> cands;
};

class Solver {
 public:
  Solver(const HomDigraph& g, const LayerBound& bound, std::chrono::steady_clock::time_point deadline)
      : g_(g), bound_(bound), deadline_(deadline) {}

  bool creates_cycle(const Node& s, std::size_t x) const {
    Bits succ = g_.out(x) & s.chosen;
    if (succ.none()) return false;
    Bits pred = g_.in(x) & s.chosen;
    if (pred.none()) return false;
    for (std::size_t u = succ.find_first(); u != Bits::npos; u = succ.find_next(u))
      if (s.reach[u].intersects(pred)) return true;
    return false;
  }

  Node include(const Node& s, std::size_t c) const {
    Node t{s.chosen, s.reach, {}};
    Bits rc(g_.size());
    rc.set(c);
    Bits succ = g_.out(c) & s.chosen;
    for (std::size_t u = succ.find_first(); u != Bits::npos; u = succ.find_next(u)) rc |= s.reach[u];
    Bits pred = g_.in(c) & s.chosen;
    if (pred.any())
      for (std::size_t v = s.chosen.find_first(); v != Bits::npos; v = s.chosen.find_next(v))
        if (s.reach[v].intersects(pred)) t.reach[v] |= rc;
    t.reach[c] = std::move(rc);
    t.chosen.set(c);
    for (auto x : s.cands)
      if (x != c && !creates_cycle(t, x)) t.cands.push_back(x);
    return t;
  }

  Node exclude(const Node& s) const {
    Node t{s.chosen, s.reach, {}};
    t.cands.assign(s.cands.begin() + 1, s.cands.end());
    return t;
  }

  std::size_t upper_bound(const Node& s) const {
    Bits all = s.chosen;
    for (auto x : s.cands) all.set(x);
    return std::min(all.count(), bound_(all));
  }

  // Depth-first, include before exclude. `best` is shared; `local` keeps the
  // first subset in this traversal reaching a new maximum.
  void run(Node s, std::atomic<std::int64_t>& best, std::optional<Bits>& local) {
    if (timed_out_) return;
    const auto size = static_cast<std::int64_t>(s.chosen.count());
    std::int64_t cur = best.load();
    while (size > cur) {
      if (best.compare_exchange_weak(cur, size)) {
        local = s.chosen;
        break;
      }
    }
    if ((++nodes_ & 1023u) == 1 && std::chrono::steady_clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (s.cands.empty()) return;
    if (static_cast<std::int64_t>(upper_bound(s)) <= best.load()) return;
    const std::size_t c = s.cands.front();
    run(include(s, c), best, local);
    run(exclude(s), best, local);
  }

  std::uint64_t nodes() const { return nodes_; }
  bool timed_out() const { return timed_out_; }

 private:
  const HomDigraph& g_;
  const LayerBound& bound_;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace detail

/// Greedy acyclic subset: the forced vertex, then every vertex in (a, b)
/// order that closes no cycle. A lower bound for max_exceptional.
inline std::vector<BiDegree> greedy_collection(const HomDigraph& g, const BiDegree& forced) {
  auto root = g.index_of(forced);
  if (!root) return {};
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return g.vertex(x) < g.vertex(y); });
  Bits chosen(g.size());
  chosen.set(*root);
  for (auto v : order) {
    if (chosen.test(v)) continue;
    chosen.set(v);
    if (!g.acyclic(chosen)) chosen.reset(v);
  }
  auto topo = g.topological_order(chosen);
  std::vector<BiDegree> out;
  for (auto v : *topo) out.push_back(g.vertex(v));
  return out;
}

/// Exact maximum size of a subset of the digraph's vertices containing the
/// forced vertex whose induced digraph is acyclic, with a witness order.
inline SearchResult max_exceptional(const HomDigraph& g, const SearchOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto deadline = start + opt.timeout;
  SearchResult res;
  auto& log = res.proof_log;

  const BiDegree forced = opt.forced ? *opt.forced : g.calculator().ring().zero();
  auto root_index = g.index_of(forced);
  if (!root_index) throw Error(ErrorKind::InvalidArgument, "window does not contain the forced vertex O" + forced.to_string());

  // Vertices in (a, b) order so include-first finds the lexicographically first optimum.
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return g.vertex(x) < g.vertex(y); });

  detail::LayerBound bound(g, log, opt.layer_bound);
  detail::Solver probe(g, bound, deadline);

  detail::Node root{Bits(g.size()), std::vector<Bits>(g.size(), Bits(g.size())), {}};
  root.chosen.set(*root_index);
  root.reach[*root_index].set(*root_index);
  for (auto v : order)
    if (v != *root_index && !probe.creates_cycle(root, v)) root.cands.push_back(v);
  log.push_back("forced vertex O" + forced.to_string() + "; " + std::to_string(root.cands.size()) +
                " candidates compatible with it out of " + std::to_string(g.size() - 1));
  log.push_back("root upper bound: " + std::to_string(probe.upper_bound(root)));

  // The hint lets the search skip subtrees that cannot beat hint - 1.
  const std::int64_t floor = std::max<std::int64_t>(0, opt.lower_bound_hint - 1);
  std::atomic<std::int64_t> best{floor};
  std::optional<Bits> winner;
  bool timed_out = false;
  const unsigned threads = opt.deterministic ? 1u : std::max(1u, opt.threads);

  if (threads == 1) {
    detail::Solver solver(g, bound, deadline);
    solver.run(root, best, winner);
    res.nodes = solver.nodes();
    timed_out = solver.timed_out();
  } else {
    // Split the top of the tree into disjoint subtrees, in DFS order.
    std::vector<detail::Node> tasks;
    std::size_t depth = 0;
    while ((1u << depth) < threads * 8u && depth < 16) ++depth;
    std::function<void(detail::Node, std::size_t)> split = [&](detail::Node s, std::size_t d) {
      if (d == 0 || s.cands.empty()) {
        tasks.push_back(std::move(s));
        return;
      }
      auto inc = probe.include(s, s.cands.front());
      auto exc = probe.exclude(s);
      split(std::move(inc), d - 1);
      split(std::move(exc), d - 1);
    };
    split(root, depth);
    std::vector<std::optional<Bits>> found(tasks.size());
    std::vector<std::uint64_t> nodes(tasks.size(), 0);
    std::vector<char> expired(tasks.size(), 0);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          detail::Solver solver(g, bound, deadline);
          solver.run(tasks[i], best, found[i]);
          nodes[i] = solver.nodes();
          expired[i] = solver.timed_out();
        }
      });
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      res.nodes += nodes[i];
      timed_out = timed_out || expired[i];
      if (found[i] && (!winner || found[i]->count() > winner->count())) winner = found[i];
    }
    log.push_back("parallel: " + std::to_string(tasks.size()) + " subtrees on " + std::to_string(threads) + " threads");
  }

  if (!winner && !timed_out && opt.lower_bound_hint > 0) {
    log.push_back("hint " + std::to_string(opt.lower_bound_hint) + " not attained; rerunning without it");
    SearchOptions again = opt;
    again.lower_bound_hint = 0;
    again.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    auto r = max_exceptional(g, again);
    r.proof_log.insert(r.proof_log.begin(), log.begin(), log.end());
    r.nodes += res.nodes;
    r.seconds = std::chrono::duration<double>(clock::now() - start).count();
    return r;
  }

  if (winner) {
    auto topo = g.topological_order(*winner);
    if (!topo) throw Error(ErrorKind::InvalidArgument, "internal: witness is cyclic");
    std::vector<BiDegree> seq;
    for (auto v : *topo) seq.push_back(g.vertex(v));
    res.witness = verify_collection(g.calculator(), seq);
    res.size = static_cast<std::int64_t>(seq.size());
  }
  res.optimal = !timed_out;
  res.seconds = std::chrono::duration<double>(clock::now() - start).count();
  log.push_back("nodes explored: " + std::to_string(res.nodes));
  if (res.optimal)
    log.push_back("search exhausted: no acyclic subset larger than " + std::to_string(res.size) + " exists");
  else
    log.push_back("timeout: best found " + std::to_string(res.size) + " is not certified optimal");
  return res;
}

}  // namespace invpoly
