#pragma once

// Diagonal symmetry groups of an invertible polynomial. Elements of the torus
// are stored as exact phase vectors p / D modulo 1. G_w is read off the Smith
// normal form of the exponent matrix; the quotient by the exponential grading
// subgroup and the character values of the variables come from a second SNF.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "invpoly/errors.hpp"
#include "invpoly/integer_lattice.hpp"
#include "invpoly/invertible_poly.hpp"

namespace invpoly {

/// (e^{2 pi i p_1/D}, ..., e^{2 pi i p_n/D}) with 0 <= p_i < D and D minimal.
class DiagonalElement {
 public:
  DiagonalElement() : den_(1) {}

  DiagonalElement(std::vector<Integer> num, Integer den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ <= 0) throw Error(ErrorKind::InvalidArgument, "phase denominator must be positive");
    normalize();
  }

  static DiagonalElement identity(std::size_t n) { return DiagonalElement(std::vector<Integer>(n), 1); }

  static DiagonalElement from_phases(std::span<const Rational> phases) {
    Integer den = 1;
    for (const auto& p : phases) den = lcm(den, boost::multiprecision::denominator(p));
    std::vector<Integer> num;
    num.reserve(phases.size());
    for (const auto& p : phases) num.push_back(boost::multiprecision::numerator(Rational(p * den)));
    return DiagonalElement(std::move(num), den);
  }

  /// The scalar element (k/D, ..., k/D).
  static DiagonalElement scalar(std::size_t n, const Integer& k, const Integer& den) {
    return DiagonalElement(std::vector<Integer>(n, k), den);
  }

  std::size_t size() const noexcept { return num_.size(); }
  const std::vector<Integer>& numerators() const noexcept { return num_; }
  const Integer& denominator() const noexcept { return den_; }
  Rational phase(std::size_t i) const { return Rational(num_[i], den_); }
  bool fixes(std::size_t i) const { return num_[i] == 0; }
  bool is_identity() const { return den_ == 1; }

  /// Order of the element in the torus; equals the minimal denominator.
  const Integer& order() const noexcept { return den_; }

  DiagonalElement operator*(const DiagonalElement& o) const {
    check_size(o);
    Integer den = lcm(den_, o.den_);
    std::vector<Integer> num(num_.size());
    for (std::size_t i = 0; i < num.size(); ++i) num[i] = num_[i] * (den / den_) + o.num_[i] * (den / o.den_);
    return DiagonalElement(std::move(num), std::move(den));
  }

  DiagonalElement pow(const Integer& k) const {
    std::vector<Integer> num(num_.size());
    for (std::size_t i = 0; i < num.size(); ++i) num[i] = num_[i] * k;
    return DiagonalElement(std::move(num), den_);
  }

  DiagonalElement inverse() const { return pow(-1); }

  /// Whether every monomial row of `a` is left invariant, i.e. a * phases is integral.
  bool preserves(const IntMatrix& a) const {
    if (a.cols() != num_.size()) throw Error(ErrorKind::InvalidArgument, "element/matrix size mismatch");
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Integer s = 0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * num_[j];
      if (s % den_ != 0) return false;
    }
    return true;
  }

  /// Phase picked up by monomial row i of `a`, as a rational mod 1.
  Rational character_of_row(const IntMatrix& a, std::size_t i) const {
    Integer s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * num_[j];
    return Rational(mod_floor(s, den_), den_);
  }

  /// Lexicographic order on phase vectors as rationals in [0, 1).
  bool phase_less(const DiagonalElement& o) const {
    check_size(o);
    for (std::size_t i = 0; i < num_.size(); ++i) {
      Integer l = num_[i] * o.den_, r = o.num_[i] * den_;
      if (l != r) return l < r;
    }
    return false;
  }

  friend bool operator==(const DiagonalElement&, const DiagonalElement&) = default;
  friend bool operator<(const DiagonalElement& a, const DiagonalElement& b) {
    if (a.den_ != b.den_) return a.den_ < b.den_;
    return a.num_ < b.num_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < num_.size(); ++i) os << (i ? ", " : "") << num_[i];
    os << ")/" << den_;
    return os.str();
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < num_.size(); ++i) {
      Rational p = phase(i);
      arr.push_back({boost::multiprecision::numerator(p).convert_to<long long>(),
                     boost::multiprecision::denominator(p).convert_to<long long>()});
    }
    return arr;
  }

 private:
  void normalize() {
    Integer g = den_;
    for (auto& x : num_) {
      x = mod_floor(x, den_);
      g = gcd(g, x);
    }
    if (g > 1) {
      for (auto& x : num_) x /= g;
      den_ /= g;
    }
  }
  void check_size(const DiagonalElement& o) const {
    if (o.num_.size() != num_.size()) throw Error(ErrorKind::InvalidArgument, "element size mismatch");
  }

  std::vector<Integer> num_;
  Integer den_;
};

/// All elements of the subgroup generated by `gens`; throws if it exceeds `limit`.
inline std::set<DiagonalElement> generated_subgroup(std::span<const DiagonalElement> gens, std::size_t n,
                                                    std::size_t limit = 1'000'000) {
  std::set<DiagonalElement> seen{DiagonalElement::identity(n)};
  std::deque<DiagonalElement> todo{DiagonalElement::identity(n)};
  while (!todo.empty()) {
    DiagonalElement x = std::move(todo.front());
    todo.pop_front();
    for (const auto& g : gens) {
      DiagonalElement y = x * g;
      if (seen.insert(y).second) {
        if (seen.size() > limit) throw Error(ErrorKind::InvalidArgument, "subgroup exceeds enumeration limit");
        todo.push_back(std::move(y));
      }
    }
  }
  return seen;
}

/// Finite abelian group presented by invariant factors, one generator each.
struct FiniteAbelianGroup {
  std::vector<Integer> invariant_factors;
  std::vector<DiagonalElement> generators;
  std::size_t ambient_dim = 0;

  Integer order() const {
    Integer o = 1;
    for (const auto& f : invariant_factors) o *= f;
    return o;
  }
  bool cyclic() const { return invariant_factors.size() <= 1; }
  bool trivial() const { return invariant_factors.empty(); }

  /// Exponent of the group (lcm of invariant factors).
  Integer exponent() const {
    Integer e = 1;
    for (const auto& f : invariant_factors) e = lcm(e, f);
    return e;
  }

  /// Element prod_k g_k^{e_k}.
  DiagonalElement element(std::span<const Integer> exps) const {
    DiagonalElement x = DiagonalElement::identity(ambient_dim);
    for (std::size_t k = 0; k < generators.size(); ++k) x = x * generators[k].pow(exps[k]);
    return x;
  }

  std::set<DiagonalElement> elements(std::size_t limit = 1'000'000) const {
    if (order() > limit) throw Error(ErrorKind::InvalidArgument, "group exceeds enumeration limit");
    return generated_subgroup(generators, ambient_dim, limit);
  }

  nlohmann::json to_json() const {
    auto f = nlohmann::json::array();
    for (const auto& x : invariant_factors) f.push_back(x.convert_to<long long>());
    auto g = nlohmann::json::array();
    for (const auto& x : generators) g.push_back(x.to_json());
    return {{"invariant_factors", f}, {"generators", g}, {"order", order().convert_to<long long>()}};
  }
};

namespace detail {

// Lexicographically minimal phase vector among the generators u * g of the
// cyclic group <g>, u a unit mod ord(g).
inline DiagonalElement canonical_cyclic_generator(const DiagonalElement& g) {
  const Integer& m = g.order();
  if (m > 2'000'000) return g;
  DiagonalElement best = g;
  for (Integer u = 2; u < m; ++u) {
    if (gcd(u, m) != 1) continue;
    DiagonalElement c = g.pow(u);
    if (c.phase_less(best)) best = std::move(c);
  }
  return best;
}

// G = A^{-1} Z^n / Z^n presented through U A V = D: generator k is V e_k / d_k.
struct SnfPresentation {
  std::vector<Integer> factors;            // all diagonal entries, including 1s
  std::vector<DiagonalElement> basis;      // V e_k / d_k
  IntMatrix v_inverse;

  // Coordinates of an element of G in the basis, coordinate k taken mod d_k.
  std::vector<Integer> coordinates(const DiagonalElement& x) const {
    const std::size_t n = factors.size();
    std::vector<Integer> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      Rational y = 0;
      for (std::size_t j = 0; j < n; ++j) y += Rational(v_inverse(k, j)) * x.phase(j);
      Rational scaled = y * factors[k];
      if (boost::multiprecision::denominator(scaled) != 1)
        throw Error(ErrorKind::InvalidArgument, "element does not lie in the group");
      out[k] = mod_floor(boost::multiprecision::numerator(scaled), factors[k]);
    }
    return out;
  }

  DiagonalElement element(std::span<const Integer> coords) const {
    DiagonalElement x = DiagonalElement::identity(factors.size());
    for (std::size_t k = 0; k < coords.size(); ++k) x = x * basis[k].pow(coords[k]);
    return x;
  }
};

inline SnfPresentation snf_presentation(const IntMatrix& a) {
  if (!a.square()) throw Error(ErrorKind::NotSquare, "exponent matrix must be square");
  if (determinant(a) == 0) throw Error(ErrorKind::SingularMatrix, "exponent matrix is singular");
  auto snf = smith_normal_form(a);
  const std::size_t n = a.rows();
  SnfPresentation p;
  p.v_inverse = unimodular_inverse(snf.V);
  for (std::size_t k = 0; k < n; ++k) {
    p.factors.push_back(snf.D(k, k));
    std::vector<Integer> num(n);
    for (std::size_t i = 0; i < n; ++i) num[i] = snf.V(i, k);
    p.basis.emplace_back(std::move(num), snf.D(k, k));
  }
  return p;
}

}  // namespace detail

/// Group of diagonal symmetries {phi : A phi in Z^n} / Z^n of the exponent matrix.
inline FiniteAbelianGroup diagonal_symmetries(const IntMatrix& a) {
  auto pres = detail::snf_presentation(a);
  FiniteAbelianGroup g;
  g.ambient_dim = a.rows();
  for (std::size_t k = 0; k < pres.factors.size(); ++k) {
    if (pres.factors[k] == 1) continue;
    g.invariant_factors.push_back(pres.factors[k]);
    g.generators.push_back(detail::canonical_cyclic_generator(pres.basis[k]));
  }
  return g;
}

inline FiniteAbelianGroup compute_Gw(const InvertiblePolynomial& p) { return diagonal_symmetries(p.exponents()); }

/// Closed-form generator of G_w for the loop x1^a1 x2 + ... + xn^an x1:
/// phi_j = (-1)^{n+1-j} a_1...a_{j-1} / (a_1...a_n + (-1)^{n+1}).
inline DiagonalElement loop_generator_formula(std::span<const Integer> a) {
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "loop needs at least two variables");
  Integer prod = 1;
  for (const auto& x : a) {
    if (x < 1) throw Error(ErrorKind::InvalidArgument, "loop exponents must be positive");
    prod *= x;
  }
  Integer den = prod + ((n + 1) % 2 == 0 ? 1 : -1);
  if (den == 0) throw Error(ErrorKind::DegenerateLoop, "a_1...a_n + (-1)^(n+1) vanishes");
  std::vector<Integer> num(n);
  Integer partial = 1;
  for (std::size_t j = 1; j <= n; ++j) {
    num[j - 1] = ((n + 1 - j) % 2 == 0 ? partial : Integer(-partial));
    partial *= a[j - 1];
  }
  if (den < 0) {
    den = -den;
    for (auto& x : num) x = -x;
  }
  return DiagonalElement(std::move(num), std::move(den));
}

enum class SplitModel {
  /// Gbar realized as a complement of J_w cap G_w inside G_w.
  GwComplement,
  /// Gbar realized as the kernel of the splitting character prod t_i^{b_i}.
  SplittingKernel,
};

constexpr std::string_view to_string(SplitModel m) {
  return m == SplitModel::GwComplement ? "Gw-complement" : "splitting-kernel";
}

/// Gamma_w = J_w x Gbar_w together with the bigrading data of the variables:
/// x_i has degree (q_i, c_i) with c_i in Z/m_1 x ... x Z/m_r.
struct GammaStructure {
  IntMatrix exponents;
  std::vector<Integer> q;
  Integer d;
  std::vector<Integer> b;  // sum b_i q_i == 1
  FiniteAbelianGroup gw;
  FiniteAbelianGroup jw_cap_gw;
  FiniteAbelianGroup gbar;  // generators are the Gbar factor generators inside Gamma_w
  SplitModel model = SplitModel::GwComplement;
  std::vector<std::int64_t> moduli;                   // m_k
  std::vector<std::vector<std::int64_t>> characters;  // characters[i][k] = c_{i,k} mod m_k

  std::size_t n() const { return q.size(); }
  std::size_t rank() const { return moduli.size(); }

  std::int64_t weight(std::size_t i) const { return q[i].convert_to<std::int64_t>(); }
  std::int64_t degree() const { return d.convert_to<std::int64_t>(); }

  bool weights_all_one() const {
    return std::all_of(q.begin(), q.end(), [](const Integer& x) { return x == 1; });
  }

  /// Character of a monomial row of the exponent matrix.
  std::vector<std::int64_t> row_character(std::size_t row) const {
    std::vector<std::int64_t> out(rank(), 0);
    for (std::size_t k = 0; k < rank(); ++k) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < n(); ++j) s += exponents(row, j).convert_to<std::int64_t>() * characters[j][k];
      out[k] = ((s % moduli[k]) + moduli[k]) % moduli[k];
    }
    return out;
  }

  /// Character of w (all rows agree).
  std::vector<std::int64_t> w_character() const { return row_character(0); }

  /// sum_i c_i, the character of the volume form sum (-1)^i x_i dx_1..^..dx_n.
  std::vector<std::int64_t> omega_character() const {
    std::vector<std::int64_t> out(rank(), 0);
    for (std::size_t k = 0; k < rank(); ++k) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n(); ++i) s += characters[i][k];
      out[k] = s % moduli[k];
    }
    return out;
  }
};

namespace detail {

inline std::int64_t to_residue(const Rational& scaled, std::int64_t m) {
  if (boost::multiprecision::denominator(scaled) != 1)
    throw Error(ErrorKind::InvalidArgument, "character value is not a residue");
  Integer r = mod_floor(boost::multiprecision::numerator(scaled), Integer(m));
  return r.convert_to<std::int64_t>();
}

}  // namespace detail

/// Builds J_w cap G_w, Gbar_w with canonical generators, the splitting
/// coefficients b and the character values of the variables.
///
/// When J_w cap G_w has a complement H in G_w, Gbar_w is identified with H,
/// so the characters are the phases of H's generators and w has trivial
/// character. Otherwise Gbar_w is realized as the kernel of t -> prod t_i^{b_i}.
inline GammaStructure gamma_structure(const InvertiblePolynomial& p) {
  const std::size_t n = p.n();
  GammaStructure gs;
  gs.exponents = p.exponents();
  gs.q = p.q();
  gs.d = p.d();
  gs.b = splitting_coefficients(gs.q);

  auto pres = detail::snf_presentation(p.exponents());
  gs.gw = diagonal_symmetries(p.exponents());

  // Generator of J_w cap G_w: f(e^{2 pi i / d}) = (q_1/d, ..., q_n/d).
  DiagonalElement j0(gs.q, gs.d);
  gs.jw_cap_gw.ambient_dim = n;
  if (!j0.is_identity()) {
    gs.jw_cap_gw.invariant_factors.push_back(j0.order());
    gs.jw_cap_gw.generators.push_back(j0);
  }

  // Quotient Z^n / (rows diag(d_k), coords(j0)) through a second SNF.
  IntMatrix rel(n + 1, n);
  for (std::size_t k = 0; k < n; ++k) rel(k, k) = pres.factors[k];
  auto jc = pres.coordinates(j0);
  for (std::size_t k = 0; k < n; ++k) rel(n, k) = jc[k];
  auto snf = smith_normal_form(rel);
  IntMatrix vinv = unimodular_inverse(snf.V);

  std::vector<Integer> factors;
  std::vector<DiagonalElement> lifts;
  for (std::size_t k = 0; k < n; ++k) {
    if (snf.D(k, k) == 1) continue;
    if (snf.D(k, k) == 0) throw Error(ErrorKind::InvalidArgument, "quotient group is infinite");
    std::vector<Integer> coords(n);
    for (std::size_t l = 0; l < n; ++l) coords[l] = vinv(k, l);
    factors.push_back(snf.D(k, k));
    lifts.push_back(pres.element(coords));
  }
  for (const auto& f : factors) {
    if (f > INT32_MAX) throw Error(ErrorKind::NotImplemented, "quotient group factor too large");
    gs.moduli.push_back(f.convert_to<std::int64_t>());
  }
  const std::size_t r = factors.size();
  Integer gbar_order = 1;
  for (const auto& f : factors) gbar_order *= f;

  // Search lifts h_k + t_k j0 generating a subgroup of order |Gbar|.
  std::optional<std::vector<DiagonalElement>> complement;
  const Integer jord = j0.order();
  Integer combos = 1;
  for (std::size_t k = 0; k < r; ++k) combos *= jord;
  if (r > 0 && combos <= 4096 && gbar_order <= 200'000) {
    std::vector<Integer> t(r, 0);
    for (Integer c = 0; c < combos && !complement; ++c) {
      Integer rest = c;
      for (std::size_t k = r; k-- > 0;) {
        t[k] = rest % jord;
        rest /= jord;
      }
      std::vector<DiagonalElement> cand;
      bool orders_ok = true;
      for (std::size_t k = 0; k < r; ++k) {
        cand.push_back(lifts[k] * j0.pow(t[k]));
        orders_ok = orders_ok && cand.back().order() == factors[k];
      }
      if (!orders_ok) continue;
      if (Integer(generated_subgroup(cand, n, 200'001).size()) == gbar_order) complement = std::move(cand);
    }
  }

  gs.gbar.ambient_dim = n;
  gs.gbar.invariant_factors = factors;
  gs.characters.assign(n, std::vector<std::int64_t>(r, 0));
  if (r == 0) {
    gs.model = SplitModel::GwComplement;
  } else if (complement) {
    gs.model = SplitModel::GwComplement;
    for (std::size_t k = 0; k < r; ++k) {
      DiagonalElement g = detail::canonical_cyclic_generator((*complement)[k]);
      for (std::size_t i = 0; i < n; ++i) gs.characters[i][k] = detail::to_residue(g.phase(i) * factors[k], gs.moduli[k]);
      gs.gbar.generators.push_back(std::move(g));
    }
  } else {
    gs.model = SplitModel::SplittingKernel;
    for (std::size_t k = 0; k < r; ++k) {
      const DiagonalElement& h = lifts[k];
      Rational lam = 0;
      for (std::size_t j = 0; j < n; ++j) lam += Rational(gs.b[j]) * h.phase(j);
      std::vector<Rational> psi(n);
      for (std::size_t i = 0; i < n; ++i) psi[i] = h.phase(i) - Rational(gs.q[i]) * lam;
      DiagonalElement g = detail::canonical_cyclic_generator(DiagonalElement::from_phases(psi));
      for (std::size_t i = 0; i < n; ++i) gs.characters[i][k] = detail::to_residue(g.phase(i) * factors[k], gs.moduli[k]);
      gs.gbar.generators.push_back(std::move(g));
    }
  }
  return gs;
}

/// Scalar element tau = (1/M, ..., 1/M), M the exponent of Gbar_w.
inline DiagonalElement scalar_tau(const GammaStructure& gs) {
  return DiagonalElement::scalar(gs.n(), 1, gs.gbar.exponent());
}

inline nlohmann::json to_json(const GammaStructure& gs) {
  auto ints = [](const std::vector<Integer>& v) {
    auto a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(x.convert_to<long long>());
    return a;
  };
  return {{"q", ints(gs.q)},
          {"d", gs.d.convert_to<long long>()},
          {"b", ints(gs.b)},
          {"G_w", gs.gw.to_json()},
          {"J_w_cap_G_w", gs.jw_cap_gw.to_json()},
          {"Gbar_w", gs.gbar.to_json()},
          {"split_model", std::string(to_string(gs.model))},
          {"moduli", gs.moduli},
          {"characters", gs.characters}};
}

}  // namespace invpoly
