#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "invpoly/exceptional_search.hpp"
#include "invpoly/presets.hpp"

using namespace invpoly;

namespace {

const ExtCalculator& calc() {
  static const GammaStructure gs = gamma_structure(presets::lu_counterexample());
  static const ExtCalculator c(gs);
  return c;
}

BiDegree bd(std::int64_t a, std::int64_t b) { return calc().ring().make(a, b); }

std::vector<BiDegree> bds(std::initializer_list<std::pair<std::int64_t, std::int64_t>> xs) {
  std::vector<BiDegree> out;
  for (auto [a, b] : xs) out.push_back(bd(a, b));
  return out;
}

const Window& box_window() {
  static const Window w = candidate_window(calc());
  return w;
}

const HomDigraph& box_graph() {
  static const HomDigraph g(calc(), box_window().vertices);
  return g;
}

std::vector<BiDegree> sharp() {
  std::vector<BiDegree> out;
  for (auto [a, b] : presets::lu_sharp_collection()) out.push_back(bd(a, b));
  return out;
}

// Oracle: exhaustive search over subsets containing the forced vertex.
std::size_t brute_max_acyclic(const HomDigraph& g, std::size_t forced) {
  const std::size_t n = g.size();
  std::size_t best = 0;
  for (std::uint64_t m = 0; m < (1ull << n); ++m) {
    if (!((m >> forced) & 1)) continue;
    Bits s(n);
    for (std::size_t i = 0; i < n; ++i)
      if ((m >> i) & 1) s.set(i);
    if (s.count() > best && g.acyclic(s)) best = s.count();
  }
  return best;
}

}  // namespace

TEST(Window, LayerCutoffGives45) {
  const auto& w = box_window();
  EXPECT_EQ(w.full_row, 3);
  EXPECT_EQ(w.max_layer, 4);
  ASSERT_EQ(w.vertices.size(), 45u);
  std::set<BiDegree> got(w.vertices.begin(), w.vertices.end());
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b < 11; ++b) EXPECT_TRUE(got.count(bd(a, b)));
  EXPECT_TRUE(got.count(bd(4, 0)));
  EXPECT_FALSE(got.count(bd(5, 0)));
  EXPECT_TRUE(got.count(bd(0, 3)));
}

TEST(Window, TwoCycleRuleAgainstOracle) {
  auto w = candidate_window(calc(), WindowRule::TwoCycleWithOrigin);
  // Oracle: pairwise ext_dims against O over the same layers.
  std::vector<BiDegree> expect;
  for (std::int64_t a = 0; a <= 4; ++a)
    for (std::int64_t b = 0; b < 11; ++b) {
      auto d = bd(a, b);
      bool two_cycle = !calc().ext_dims(bd(0, 0), d).vanishes() && !calc().ext_dims(d, bd(0, 0)).vanishes();
      if (d == bd(0, 0) || !two_cycle) expect.push_back(d);
    }
  EXPECT_EQ(w.vertices, expect);
  EXPECT_EQ(w.vertices.size(), 40u);
  // Layers beyond the cutoff are all in 2-cycles with O.
  for (std::int64_t a = 5; a <= 9; ++a)
    for (std::int64_t b = 0; b < 11; ++b) {
      EXPECT_FALSE(calc().ext_dims(bd(0, 0), bd(a, b)).vanishes());
      EXPECT_FALSE(calc().ext_dims(bd(a, b), bd(0, 0)).vanishes());
    }
}

TEST(Window, CapAtLayerZero) {
  auto w = candidate_window(calc(), WindowRule::LayerCutoff, 0);
  EXPECT_EQ(w.vertices.size(), 11u);
}

TEST(HomDigraph, EdgesDependOnDifferenceOnly) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> a(-3, 5), b(0, 10);
  for (int t = 0; t < 100; ++t) {
    auto u = bd(a(rng), b(rng)), v = bd(a(rng), b(rng)), s = bd(a(rng), b(rng));
    if (u == v) continue;
    HomDigraph g1(calc(), {u, v});
    HomDigraph g2(calc(), {calc().ring().add(u, s), calc().ring().add(v, s)});
    EXPECT_EQ(g1.edge(0, 1), g2.edge(0, 1));
    EXPECT_EQ(g1.edge(1, 0), g2.edge(1, 0));
    auto serre = calc().ext_dims_serre(u, v);
    EXPECT_EQ(g1.edge(0, 1), !serre.vanishes());
  }
}

TEST(HomDigraph, ExportFormats) {
  HomDigraph g(calc(), bds({{0, 0}, {2, 0}, {4, 0}}));
  auto j = g.to_json();
  EXPECT_EQ(j["vertices"].size(), 3u);
  EXPECT_EQ(j["edges"].size(), 3u);
  auto dot = g.to_dot();
  EXPECT_NE(dot.find("digraph hom"), std::string::npos);
  EXPECT_NE(dot.find("v0 -> v2"), std::string::npos);
}

TEST(VerifyCollection, SharpCollectionIsValid) {
  auto cert = verify_collection(calc(), sharp());
  EXPECT_TRUE(cert.valid());
  EXPECT_EQ(cert.order.size(), 24u);
}

TEST(VerifyCollection, ThreeLoopInAnyOrderFails) {
  auto triple = bds({{0, 0}, {2, 0}, {4, 0}});
  std::sort(triple.begin(), triple.end());
  do {
    auto cert = verify_collection(calc(), triple);
    ASSERT_FALSE(cert.valid());
    EXPECT_FALSE(cert.violation->degrees.empty());
    EXPECT_GT(cert.violation->later, cert.violation->earlier);
  } while (std::next_permutation(triple.begin(), triple.end()));
}

TEST(VerifyCollection, TrivialCases) {
  EXPECT_TRUE(verify_collection(calc(), bds({{0, 0}})).valid());
  EXPECT_TRUE(verify_collection(calc(), {}).valid());
  auto dup = verify_collection(calc(), bds({{0, 0}, {0, 0}}));
  EXPECT_FALSE(dup.valid());
}

TEST(VerifyCollection, ReportsExtDegree) {
  // O(2,0) -> O has only Ext^3; placing O first is fine, O(2,0) first is not.
  auto cert = verify_collection(calc(), bds({{0, 0}, {2, 0}}));
  ASSERT_FALSE(cert.valid());
  EXPECT_EQ(cert.violation->degrees, std::vector<std::size_t>{3});
  EXPECT_TRUE(verify_collection(calc(), bds({{2, 0}, {0, 0}})).valid());
}

TEST(VerifyCollection, AcyclicIffOrderable) {
  std::mt19937_64 rng(31);
  const auto& g = box_graph();
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1), len(1, 7);
  for (int t = 0; t < 60; ++t) {
    std::set<std::size_t> idx;
    const std::size_t k = len(rng);
    while (idx.size() < k) idx.insert(pick(rng));
    std::vector<BiDegree> sub;
    Bits mask(g.size());
    for (auto i : idx) {
      sub.push_back(g.vertex(i));
      mask.set(i);
    }
    std::sort(sub.begin(), sub.end());
    bool some_order = false;
    do {
      some_order = some_order || verify_collection(calc(), sub).valid();
    } while (!some_order && std::next_permutation(sub.begin(), sub.end()));
    EXPECT_EQ(some_order, g.acyclic(mask));
  }
}

TEST(FindCycles, KnownObstructions) {
  HomDigraph quad(calc(), bds({{0, 1}, {0, 2}, {2, 1}, {2, 2}}));
  auto c4 = find_cycles(quad, 4);
  EXPECT_TRUE(std::any_of(c4.begin(), c4.end(), [](const auto& c) { return c.size() == 4; }));

  HomDigraph tri(calc(), bds({{0, 0}, {2, 0}, {4, 0}}));
  auto c3 = find_cycles(tri, 3);
  ASSERT_EQ(c3.size(), 1u);
  EXPECT_EQ(c3[0].size(), 3u);

  HomDigraph pair(calc(), bds({{0, 0}, {0, 1}}));
  EXPECT_TRUE(find_cycles(pair, 4).empty());
}

TEST(FindCycles, EveryQuadrupleHasAFourCycle) {
  for (std::int64_t a = 0; a <= 2; ++a)
    for (std::int64_t b = 0; b < 11; ++b)
      for (std::int64_t b2 = b + 1; b2 < 11; ++b2) {
        HomDigraph g(calc(), bds({{a, b}, {a, b2}, {a + 2, b}, {a + 2, b2}}));
        auto cs = find_cycles(g, 4);
        EXPECT_TRUE(std::any_of(cs.begin(), cs.end(), [](const auto& c) { return c.size() == 4; }))
            << a << " " << b << " " << b2;
      }
}

TEST(MaxExceptional, SmallWindowsAgainstBruteForce) {
  std::mt19937_64 rng(77);
  const auto& g = box_graph();
  const std::size_t origin = *g.index_of(bd(0, 0));
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int t = 0; t < 25; ++t) {
    std::set<std::size_t> idx{origin};
    while (idx.size() < 14) idx.insert(pick(rng));
    std::vector<BiDegree> vs;
    for (auto i : idx) vs.push_back(g.vertex(i));
    HomDigraph sub(calc(), vs);
    auto r = max_exceptional(sub);
    EXPECT_TRUE(r.optimal);
    EXPECT_EQ(static_cast<std::size_t>(r.size), brute_max_acyclic(sub, *sub.index_of(bd(0, 0))));
    EXPECT_TRUE(r.witness.valid());
  }
}

TEST(MaxExceptional, TrivialWindow) {
  HomDigraph g(calc(), bds({{0, 0}}));
  auto r = max_exceptional(g);
  EXPECT_EQ(r.size, 1);
  EXPECT_TRUE(r.optimal);
}

TEST(MaxExceptional, EvenLayersAtMostTwelve) {
  std::vector<BiDegree> vs;
  for (std::int64_t a : {0, 2})
    for (std::int64_t b = 0; b < 11; ++b) vs.push_back(bd(a, b));
  HomDigraph g(calc(), vs);
  auto r = max_exceptional(g);
  EXPECT_TRUE(r.optimal);
  EXPECT_EQ(r.size, 12);
}

TEST(MaxExceptional, LayerZeroWindowIsEleven) {
  auto w = candidate_window(calc(), WindowRule::LayerCutoff, 0);
  HomDigraph g(calc(), w.vertices);
  auto r = max_exceptional(g);
  EXPECT_EQ(r.size, 11);
  EXPECT_TRUE(r.optimal);
}

TEST(MaxExceptional, ForcedVertexMustBeInWindow) {
  HomDigraph g(calc(), bds({{1, 1}}));
  EXPECT_THROW(max_exceptional(g), Error);
}

TEST(MaxExceptional, MonotoneInWindow) {
  std::vector<BiDegree> small;
  for (std::int64_t a = 0; a <= 1; ++a)
    for (std::int64_t b = 0; b < 11; ++b) small.push_back(bd(a, b));
  auto big = small;
  for (std::int64_t b = 0; b < 11; b += 2) big.push_back(bd(2, b));
  auto rs = max_exceptional(HomDigraph(calc(), small));
  auto rb = max_exceptional(HomDigraph(calc(), big));
  EXPECT_LE(rs.size, rb.size);
}

TEST(MaxExceptional, TimeoutIsFlagged) {
  SearchOptions opt;
  opt.timeout = std::chrono::milliseconds(0);
  auto r = max_exceptional(box_graph(), opt);
  EXPECT_FALSE(r.optimal);
  EXPECT_GE(r.size, 1);
}

TEST(MaxExceptional, HintAboveOptimumFallsBack) {
  std::vector<BiDegree> vs;
  for (std::int64_t a : {0, 2})
    for (std::int64_t b = 0; b < 11; ++b) vs.push_back(bd(a, b));
  HomDigraph g(calc(), vs);
  SearchOptions opt;
  opt.lower_bound_hint = 20;
  auto r = max_exceptional(g, opt);
  EXPECT_EQ(r.size, 12);
  EXPECT_TRUE(r.optimal);
}

TEST(MaxExceptional, FullWindowIs24) {
  auto r = max_exceptional(box_graph());
  EXPECT_TRUE(r.optimal);
  EXPECT_EQ(r.size, 24);
  EXPECT_TRUE(r.witness.valid());
}

TEST(MaxExceptional, ParallelMatchesSingleThread) {
  auto w = candidate_window(calc(), WindowRule::TwoCycleWithOrigin);
  HomDigraph g(calc(), w.vertices);
  auto single = max_exceptional(g);
  SearchOptions opt;
  opt.deterministic = false;
  opt.threads = 3;
  auto par = max_exceptional(g, opt);
  EXPECT_EQ(single.size, 24);
  EXPECT_EQ(par.size, single.size);
  EXPECT_TRUE(par.witness.valid());
  // Deterministic mode reproduces its witness.
  EXPECT_EQ(max_exceptional(g).witness.order, single.witness.order);
}

TEST(MaxExceptional, LayerBoundAgreesWithPlainSearch) {
  std::vector<BiDegree> vs;
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b < 11; ++b)
      if (a <= 1 || (a == 2 && b < 6) || (a == 3 && b % 3 == 0)) vs.push_back(bd(a, b));
  HomDigraph g(calc(), vs);
  SearchOptions plain;
  plain.layer_bound = false;
  auto r0 = max_exceptional(g, plain);
  auto r1 = max_exceptional(g);
  ASSERT_TRUE(r0.optimal);
  EXPECT_EQ(r0.size, r1.size);
  EXPECT_EQ(r0.witness.order, r1.witness.order);
  EXPECT_LE(r1.nodes, r0.nodes);
}
