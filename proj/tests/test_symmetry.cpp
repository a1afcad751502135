#include <random>

#include <gtest/gtest.h>

#include "invpoly/presets.hpp"
#include "invpoly/symmetry.hpp"

using namespace invpoly;

namespace {

DiagonalElement phases(std::initializer_list<long long> num, long long den) {
  return DiagonalElement(std::vector<Integer>(num.begin(), num.end()), den);
}

std::set<DiagonalElement> span_of(const DiagonalElement& g) {
  std::vector<DiagonalElement> gens{g};
  return generated_subgroup(gens, g.size());
}

// Oracle: every phi in (1/N) Z^n / Z^n with A phi integral, N = |det A|.
std::set<DiagonalElement> brute_force_group(const IntMatrix& a) {
  const std::size_t n = a.rows();
  const long long big_n = abs(determinant(a)).convert_to<long long>();
  std::set<DiagonalElement> out;
  std::vector<long long> p(n, 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      long long s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j).convert_to<long long>() * p[j];
      ok = s % big_n == 0;
    }
    if (ok) out.insert(DiagonalElement(std::vector<Integer>(p.begin(), p.end()), big_n));
    std::size_t k = 0;
    while (k < n && ++p[k] == big_n) p[k++] = 0;
    if (k == n) break;
  }
  return out;
}

}  // namespace

TEST(DiagonalElement, NormalizesToMinimalDenominator) {
  auto x = phases({11, 22, 0, -11, 44}, 33);
  EXPECT_EQ(x.denominator(), 3);
  EXPECT_EQ(x.numerators(), (std::vector<Integer>{1, 2, 0, 2, 1}));
  EXPECT_EQ(x.order(), 3);
  EXPECT_TRUE(phases({0, 0}, 7).is_identity());
  EXPECT_EQ(x * x.inverse(), DiagonalElement::identity(5));
}

TEST(Gw, CubicLoopIsCyclic33) {
  auto p = presets::lu_counterexample();
  auto g = compute_Gw(p);
  ASSERT_EQ(g.invariant_factors, std::vector<Integer>{33});
  const auto reference_g = phases({1, -2, 4, -8, 16}, 33);
  EXPECT_EQ(span_of(g.generators[0]), span_of(reference_g));
  // Lexicographically minimal generator is the g itself.
  EXPECT_EQ(g.generators[0], reference_g);
  EXPECT_TRUE(reference_g.preserves(p.exponents()));
}

TEST(Gw, FermatCubic) {
  auto g = compute_Gw(parse("x1^3"));
  ASSERT_EQ(g.invariant_factors, std::vector<Integer>{3});
  EXPECT_EQ(g.generators[0], phases({1}, 3));
}

TEST(Gw, TwoLoopOrderThree) {
  auto g = compute_Gw(parse("x1^2*x2 + x2^2*x1"));
  EXPECT_EQ(g.order(), 3);
  EXPECT_EQ(g.elements(), brute_force_group(IntMatrix{{2, 1}, {1, 2}}));
}

TEST(Gw, NonCyclicFermatSum) {
  auto p = parse("x1^2 + x2^4 + x3^4");
  auto g = compute_Gw(p);
  EXPECT_EQ(g.invariant_factors, (std::vector<Integer>{2, 4, 4}));
  EXPECT_EQ(g.elements(), brute_force_group(p.exponents()));
}

TEST(Gw, GeneratorsPreserveEveryMonomial) {
  for (const char* s : {"x1^2*x2 + x2^2*x3 + x3^2*x4 + x4^2*x5 + x5^2*x1", "x1^3*x2 + x2^4", "x1^2 + x2^4 + x3^4",
                        "x1^3*x3 + x3^2*x1 + x2^2*x4 + x4^5"}) {
    auto p = parse(s);
    auto g = compute_Gw(p);
    EXPECT_EQ(g.order(), abs(p.det())) << s;
    for (const auto& x : g.generators) {
      EXPECT_TRUE(x.preserves(p.exponents())) << s;
    }
    EXPECT_EQ(g.elements(), brute_force_group(p.exponents())) << s;
  }
}

TEST(LoopFormula, CubicLoopGeneratesSameSubgroup) {
  auto phi = loop_generator_formula(std::vector<Integer>(5, Integer(2)));
  EXPECT_EQ(phi, phases({-1, 2, -4, 8, -16}, 33));
  EXPECT_EQ(span_of(phi), span_of(phases({1, -2, 4, -8, 16}, 33)));
}

TEST(LoopFormula, TwoLoop) {
  auto phi = loop_generator_formula(std::vector<Integer>{2, 2});
  EXPECT_EQ(phi.order(), 3);
  EXPECT_EQ(span_of(phi), brute_force_group(IntMatrix{{2, 1}, {1, 2}}));
}

TEST(LoopFormula, DegenerateLoopRejected) {
  try {
    loop_generator_formula(std::vector<Integer>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateLoop);
  }
}

TEST(LoopFormula, RandomLoopsMatchSnf) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 6), ex(1, 4);
  int checked = 0;
  while (checked < 60) {
    std::vector<Integer> a(len(rng));
    for (auto& x : a) x = ex(rng);
    DiagonalElement phi;
    try {
      phi = loop_generator_formula(a);
    } catch (const Error&) {
      continue;
    }
    auto g = diagonal_symmetries(loop_matrix(a));
    EXPECT_EQ(span_of(phi), g.elements());
    EXPECT_TRUE(phi.preserves(loop_matrix(a)));
    ++checked;
  }
}

TEST(GammaStructure, CubicLoop) {
  auto gs = gamma_structure(presets::lu_counterexample());
  EXPECT_EQ(gs.model, SplitModel::GwComplement);
  EXPECT_EQ(gs.jw_cap_gw.order(), 3);
  const auto g = phases({1, -2, 4, -8, 16}, 33);
  EXPECT_EQ(span_of(gs.jw_cap_gw.generators[0]), span_of(g.pow(11)));

  ASSERT_EQ(gs.gbar.invariant_factors, std::vector<Integer>{11});
  EXPECT_EQ(gs.gbar.generators[0], phases({1, 9, 4, 3, 5}, 11));
  EXPECT_EQ(gs.moduli, std::vector<std::int64_t>{11});
  std::vector<std::int64_t> c;
  for (const auto& row : gs.characters) c.push_back(row[0]);
  EXPECT_EQ(c, (std::vector<std::int64_t>{1, 9, 4, 3, 5}));
  EXPECT_EQ(gs.b, (std::vector<Integer>{1, 0, 0, 0, 0}));
  EXPECT_EQ(gs.w_character(), std::vector<std::int64_t>{0});
  EXPECT_EQ(gs.gw.order() / gs.jw_cap_gw.order(), gs.gbar.order());
}

TEST(GammaStructure, RhoTauInverseFixesFirstCoordinate) {
  auto gs = gamma_structure(presets::lu_counterexample());
  auto tau = scalar_tau(gs);
  EXPECT_EQ(tau, phases({1, 1, 1, 1, 1}, 11));
  auto x = gs.gbar.generators[0] * tau.inverse();
  EXPECT_EQ(x, phases({0, 8, 3, 2, 4}, 11));
  EXPECT_TRUE(x.fixes(0));
}

TEST(GammaStructure, FermatCubicHasTrivialQuotient) {
  auto gs = gamma_structure(parse("x1^3"));
  EXPECT_TRUE(gs.gbar.trivial());
  EXPECT_EQ(gs.jw_cap_gw.order(), 3);
  EXPECT_EQ(gs.gw.elements(), gs.jw_cap_gw.elements());
}

TEST(GammaStructure, EveryMonomialHasCharacterOfW) {
  for (const char* s : {"x1^2*x2 + x2^2*x3 + x3^2*x4 + x4^2*x5 + x5^2*x1", "x1^3 + x2^3 + x3^3 + x4^3 + x5^3",
                        "x1^2*x2 + x2^3 + x3^4", "x1^3*x2 + x2^3*x1", "x1^4 + x2^4"}) {
    auto p = parse(s);
    auto gs = gamma_structure(p);
    for (std::size_t i = 0; i < p.n(); ++i) EXPECT_EQ(gs.row_character(i), gs.w_character()) << s;
    EXPECT_EQ(gs.gw.order(), gs.jw_cap_gw.order() * gs.gbar.order()) << s;
    Integer sb = 0;
    for (std::size_t i = 0; i < p.n(); ++i) sb += gs.b[i] * gs.q[i];
    EXPECT_EQ(sb, 1);
    for (std::size_t k = 0; k < gs.rank(); ++k) EXPECT_EQ(gs.gbar.generators[k].order(), gs.gbar.invariant_factors[k]);
  }
}

TEST(GammaStructure, NonCyclicQuotient) {
  auto gs = gamma_structure(parse("x1^3 + x2^3 + x3^3 + x4^3 + x5^3"));
  EXPECT_EQ(gs.gbar.order(), 81);
  EXPECT_EQ(gs.gbar.invariant_factors, (std::vector<Integer>(4, Integer(3))));
  EXPECT_EQ(gs.model, SplitModel::GwComplement);
  EXPECT_EQ(gs.gbar.elements().size(), 81u);
}

TEST(GammaStructure, SplittingKernelWhenNoComplementExists) {
  // Cubic 3-loop: G_w = Z/9 contains J_w cap G_w = Z/3 without a complement.
  auto p = parse("x1^2*x2 + x2^2*x3 + x3^2*x1");
  auto gs = gamma_structure(p);
  EXPECT_EQ(gs.gw.invariant_factors, std::vector<Integer>{9});
  EXPECT_EQ(gs.jw_cap_gw.order(), 3);
  EXPECT_EQ(gs.model, SplitModel::SplittingKernel);
  ASSERT_EQ(gs.moduli, std::vector<std::int64_t>{3});
  // Gbar generator lies in the kernel of t -> t_1 (b = (1, 0, 0)).
  EXPECT_TRUE(gs.gbar.generators[0].fixes(0));
  EXPECT_EQ(gs.gbar.generators[0], phases({0, 1, 2}, 3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(gs.row_character(i), gs.w_character());
  EXPECT_EQ(gs.w_character(), std::vector<std::int64_t>{1});
}
