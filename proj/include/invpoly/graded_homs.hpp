#pragma once

// Line bundles O(a, b) on [({w = 0} \ 0) / Gamma_w] with Pic = Z x (Gbar_w)^,
// and the dimensions of Ext^i between them.
//
// Two routes are provided. The direct one counts bigraded monomials:
// Hom(O, O(D)) = S_D - S_{D - deg w} (w is a nonzerodivisor) and Ext^3 comes
// from Serre duality with the canonical bidegree. The second computes every
// H^i(Z, O(D)) from the divisor sequence 0 -> O(D - deg w) -> O(D) -> O_Z(D) -> 0
// on the ambient projective space, whose cohomology is taken from the Cech
// description (Laurent monomials graded by their negative support).

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "invpoly/errors.hpp"
#include "invpoly/integer_lattice.hpp"
#include "invpoly/symmetry.hpp"

namespace invpoly {

/// Bidegree (a, b) with b in Z/m_1 x ... x Z/m_r.
struct BiDegree {
  std::int64_t a = 0;
  std::vector<std::int64_t> b;

  friend auto operator<=>(const BiDegree&, const BiDegree&) = default;
  friend bool operator==(const BiDegree&, const BiDegree&) = default;

  std::string to_string() const {
    std::ostringstream os;
    os << '(' << a;
    for (auto x : b) os << ", " << x;
    os << ')';
    return os.str();
  }

  /// [a, b_1, ..., b_r]
  nlohmann::json to_json() const {
    auto j = nlohmann::json::array({a});
    for (auto x : b) j.push_back(x);
    return j;
  }
};

/// (e0, e1, e2, e3) for a threefold; length dim Z + 1 in general.
struct ExtDims {
  std::vector<std::int64_t> e;

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto x : e) s += x;
    return s;
  }
  bool vanishes() const { return total() == 0; }
  friend bool operator==(const ExtDims&, const ExtDims&) = default;
};

/// A monomial as an exponent vector.
using Monomial = std::vector<std::int64_t>;

inline std::string monomial_string(const Monomial& e) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!first) os << '*';
    first = false;
    os << 'x' << (i + 1);
    if (e[i] != 1) os << '^' << e[i];
  }
  return first ? "1" : os.str();
}

/// Bigraded coordinate ring S = C[x_1..x_n] with deg x_i = (q_i, c_i), the
/// relation w, and the Picard arithmetic of the quotient stack.
class BigradedRing {
 public:
  explicit BigradedRing(const GammaStructure& gs)
      : n_(gs.n()), degree_(gs.degree()), moduli_(gs.moduli), chars_(gs.characters), w_char_(gs.w_character()),
        weights_all_one_(gs.weights_all_one()), cache_(std::make_shared<Cache>()) {
    for (std::size_t i = 0; i < n_; ++i) weights_.push_back(gs.weight(i));
    for (std::size_t i = 0; i < gs.exponents.rows(); ++i) {
      Monomial row;
      for (std::size_t j = 0; j < n_; ++j) row.push_back(gs.exponents(i, j).convert_to<std::int64_t>());
      w_terms_.push_back(std::move(row));
    }
    buckets_ = 1;
    for (auto m : moduli_) buckets_ *= static_cast<std::size_t>(m);
    omega_char_ = gs.omega_character();
  }

  std::size_t n() const { return n_; }
  std::int64_t degree() const { return degree_; }
  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  const std::vector<std::int64_t>& weights() const { return weights_; }
  const std::vector<std::vector<std::int64_t>>& characters() const { return chars_; }
  const std::vector<Monomial>& w_terms() const { return w_terms_; }
  bool weights_all_one() const { return weights_all_one_; }
  std::size_t character_count() const { return buckets_; }

  BiDegree make(std::int64_t a, std::vector<std::int64_t> b) const {
    if (b.size() != moduli_.size()) throw Error(ErrorKind::InvalidArgument, "bidegree has wrong character rank");
    BiDegree d{a, std::move(b)};
    reduce(d.b);
    return d;
  }
  /// Cyclic case shorthand.
  BiDegree make(std::int64_t a, std::int64_t b) const {
    if (moduli_.size() != 1) throw Error(ErrorKind::InvalidArgument, "scalar character needs a cyclic quotient");
    return make(a, std::vector<std::int64_t>{b});
  }
  BiDegree zero() const { return BiDegree{0, std::vector<std::int64_t>(moduli_.size(), 0)}; }

  BiDegree add(const BiDegree& x, const BiDegree& y) const {
    BiDegree r{x.a + y.a, x.b};
    for (std::size_t k = 0; k < r.b.size(); ++k) r.b[k] += y.b[k];
    reduce(r.b);
    return r;
  }
  BiDegree sub(const BiDegree& x, const BiDegree& y) const {
    BiDegree r{x.a - y.a, x.b};
    for (std::size_t k = 0; k < r.b.size(); ++k) r.b[k] -= y.b[k];
    reduce(r.b);
    return r;
  }
  BiDegree neg(const BiDegree& x) const { return sub(zero(), x); }

  /// Bidegree of w.
  BiDegree w_degree() const { return BiDegree{degree_, w_char_}; }

  /// Bidegree of a monomial.
  BiDegree degree_of(const Monomial& e) const {
    BiDegree d = zero();
    for (std::size_t i = 0; i < n_; ++i) {
      d.a += weights_[i] * e[i];
      for (std::size_t k = 0; k < moduli_.size(); ++k) d.b[k] += chars_[i][k] * e[i];
    }
    reduce(d.b);
    return d;
  }

  /// Canonical bundle by adjunction: (d - sum q_i, chi_w - sum c_i).
  BiDegree canonical() const {
    std::int64_t sq = 0;
    for (auto q : weights_) sq += q;
    BiDegree k{degree_ - sq, w_char_};
    for (std::size_t j = 0; j < k.b.size(); ++j) k.b[j] -= omega_char_[j];
    reduce(k.b);
    return k;
  }

  /// #{e in N^n : sum e_i q_i = a, sum e_i c_i = b}.
  std::int64_t monomial_dim(const BiDegree& deg) const {
    if (deg.a < 0) return 0;
    return histogram(deg.a)[flatten(deg.b)];
  }

  /// dim Hom(O(l1), O(l2)) = degree-(l2 - l1) part of S/(w).
  std::int64_t hom_dim(const BiDegree& l1, const BiDegree& l2) const { return hom_dim(sub(l2, l1)); }
  std::int64_t hom_dim(const BiDegree& delta) const {
    return monomial_dim(delta) - monomial_dim(sub(delta, w_degree()));
  }

  /// All monomials of weighted degree a, in decreasing lexicographic order of
  /// exponent vectors.
  std::vector<Monomial> monomials_of_degree(std::int64_t a) const {
    std::vector<Monomial> out;
    if (a < 0) return out;
    Monomial e(n_, 0);
    enumerate(0, a, e, [&](const Monomial& m) { out.push_back(m); });
    return out;
  }

  /// Monomials of bidegree `deg`, in decreasing lexicographic order.
  std::vector<Monomial> monomials_of(const BiDegree& deg) const {
    std::vector<Monomial> out;
    for (auto& m : monomials_of_degree(deg.a))
      if (degree_of(m).b == deg.b) out.push_back(std::move(m));
    return out;
  }

  std::size_t flatten(const std::vector<std::int64_t>& b) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < moduli_.size(); ++k) idx = idx * static_cast<std::size_t>(moduli_[k]) + b[k];
    return idx;
  }

  /// All character values in flattening order.
  std::vector<std::vector<std::int64_t>> all_characters() const {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> b(moduli_.size(), 0);
    for (std::size_t c = 0; c < buckets_; ++c) {
      out.push_back(b);
      for (std::size_t k = moduli_.size(); k-- > 0;) {
        if (++b[k] < moduli_[k]) break;
        b[k] = 0;
      }
    }
    return out;
  }

 private:
  struct Cache {
    std::shared_mutex mutex;
    std::map<std::int64_t, std::shared_ptr<const std::vector<std::int64_t>>> by_degree;
  };

  void reduce(std::vector<std::int64_t>& b) const {
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = ((b[k] % moduli_[k]) + moduli_[k]) % moduli_[k];
  }

  template <class F>
  void enumerate(std::size_t i, std::int64_t remaining, Monomial& e, F&& visit) const {
    if (i + 1 == n_) {
      if (remaining % weights_[i] != 0) return;
      e[i] = remaining / weights_[i];
      visit(e);
      e[i] = 0;
      return;
    }
    for (std::int64_t k = remaining / weights_[i]; k >= 0; --k) {
      e[i] = k;
      enumerate(i + 1, remaining - k * weights_[i], e, visit);
    }
    e[i] = 0;
  }

  // Character histogram of all monomials of weighted degree a. Readers share
  // the lock; a racing insert of the same degree is idempotent.
  const std::vector<std::int64_t>& histogram(std::int64_t a) const {
    {
      std::shared_lock lock(cache_->mutex);
      auto it = cache_->by_degree.find(a);
      if (it != cache_->by_degree.end()) return *it->second;
    }
    auto h = std::make_shared<std::vector<std::int64_t>>(buckets_, 0);
    Monomial e(n_, 0);
    enumerate(0, a, e, [&](const Monomial& m) { ++(*h)[flatten(degree_of(m).b)]; });
    std::unique_lock lock(cache_->mutex);
    auto [it, inserted] = cache_->by_degree.emplace(a, std::move(h));
    return *it->second;
  }

  std::size_t n_;
  std::int64_t degree_;
  std::vector<std::int64_t> weights_;
  std::vector<std::int64_t> moduli_;
  std::vector<std::vector<std::int64_t>> chars_;
  std::vector<std::int64_t> w_char_;
  std::vector<std::int64_t> omega_char_;
  std::vector<Monomial> w_terms_;
  bool weights_all_one_;
  std::size_t buckets_ = 1;
  std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Ambient cohomology and the divisor sequence.

namespace detail {

// Reduced cohomology of the complex of cones of the fan of P(q) whose rays all
// lie in `support` (bitmask). Cones are the proper subsets of {0..n-1}.
inline std::vector<std::int64_t> reduced_cohomology_of_support(std::size_t n, std::uint32_t support) {
  const std::uint32_t full = (n == 32) ? 0xffffffffu : ((1u << n) - 1);
  // faces[p + 1] = faces with p + 1 vertices (p = -1 .. n - 2)
  std::vector<std::vector<std::uint32_t>> faces(n + 1);
  for (std::uint32_t s = 0; s <= full; ++s) {
    if ((s & ~support) != 0 || s == full) continue;
    faces[static_cast<std::size_t>(__builtin_popcount(s))].push_back(s);
  }
  // coboundary from faces of size k to size k + 1
  auto coboundary_rank = [&](std::size_t k) -> std::size_t {
    if (k + 1 > n || faces[k].empty() || faces[k + 1].empty()) return 0;
    IntMatrix m(faces[k + 1].size(), faces[k].size());
    for (std::size_t r = 0; r < faces[k + 1].size(); ++r) {
      std::uint32_t big = faces[k + 1][r];
      for (std::size_t c = 0; c < faces[k].size(); ++c) {
        std::uint32_t small = faces[k][c];
        if ((small & ~big) != 0) continue;
        std::uint32_t extra = big & ~small;
        // sign = (-1)^{position of the added vertex}
        int pos = __builtin_popcount(big & (extra - 1));
        m(r, c) = (pos % 2 == 0) ? 1 : -1;
      }
    }
    return rank(std::move(m));
  };
  std::vector<std::int64_t> out(n + 1, 0);  // out[p + 1] = dim H~^p
  std::vector<std::size_t> rk(n + 1, 0);
  for (std::size_t k = 0; k <= n; ++k) rk[k] = coboundary_rank(k);
  for (std::size_t k = 0; k <= n; ++k) {
    std::int64_t dim = static_cast<std::int64_t>(faces[k].size());
    std::int64_t h = dim - static_cast<std::int64_t>(rk[k]) - (k > 0 ? static_cast<std::int64_t>(rk[k - 1]) : 0);
    out[k] = h;
  }
  return out;
}

}  // namespace detail

/// H^i(P(q), O(k)) graded by characters, for the two supports that carry
/// cohomology (all exponents >= 0, all exponents <= -1).
class AmbientCohomology {
 public:
  explicit AmbientCohomology(const BigradedRing& ring) : ring_(ring) {
    const std::size_t n = ring.n();
    if (n > 16) throw Error(ErrorKind::NotImplemented, "ambient cohomology beyond 16 variables");
    const std::uint32_t full = (1u << n) - 1;
    h_.assign(n, std::vector<std::uint32_t>{});
    for (std::uint32_t s = 0; s <= full; ++s) {
      auto red = detail::reduced_cohomology_of_support(n, s);
      for (std::size_t k = 0; k < red.size(); ++k) {
        if (red[k] == 0) continue;
        // H~^{k-1} contributes to H^{k}
        if (k >= n || red[k] != 1 || (s != 0 && s != full))
          throw Error(ErrorKind::UnsupportedGeometry, "unexpected ambient cohomology support");
        h_[k].push_back(s);
      }
    }
  }

  /// Degrees p with some support contributing to H^p.
  bool degree_carries_cohomology(std::size_t p) const { return p < h_.size() && !h_[p].empty(); }

  /// Basis of H^p(P, O(deg)) as Laurent monomials (Cech classes).
  std::vector<Monomial> basis(std::size_t p, const BiDegree& deg) const {
    std::vector<Monomial> out;
    if (!degree_carries_cohomology(p)) return out;
    const std::size_t n = ring_.n();
    for (std::uint32_t s : h_[p]) {
      if (s == 0) {
        out = ring_.monomials_of(deg);
      } else {
        // m = -1 - e with e >= 0: sum q_i e_i = -a - sum q_i
        std::int64_t sq = 0;
        for (auto q : ring_.weights()) sq += q;
        for (auto& e : ring_.monomials_of_degree(-deg.a - sq)) {
          Monomial m(n);
          for (std::size_t i = 0; i < n; ++i) m[i] = -1 - e[i];
          if (ring_.degree_of(m).b == deg.b) out.push_back(std::move(m));
        }
      }
    }
    return out;
  }

  /// Rank of multiplication by w: H^p(O(deg - deg w)) -> H^p(O(deg)).
  std::size_t multiplication_rank(std::size_t p, const BiDegree& deg) const {
    auto src = basis(p, ring_.sub(deg, ring_.w_degree()));
    auto dst = basis(p, deg);
    if (src.empty() || dst.empty()) return 0;
    std::map<Monomial, std::size_t> index;
    for (std::size_t i = 0; i < dst.size(); ++i) index.emplace(dst[i], i);
    const bool top = p != 0;
    IntMatrix m(dst.size(), src.size());
    for (std::size_t c = 0; c < src.size(); ++c) {
      for (const auto& t : ring_.w_terms()) {
        Monomial img = src[c];
        bool zero = false;
        for (std::size_t i = 0; i < img.size(); ++i) {
          img[i] += t[i];
          if (top && img[i] >= 0) zero = true;  // leaves the all-negative support: zero class
        }
        if (zero) continue;
        auto it = index.find(img);
        if (it == index.end()) throw Error(ErrorKind::InvalidArgument, "multiplication left the target basis");
        m(it->second, c) += 1;
      }
    }
    return rank(std::move(m));
  }

  std::int64_t dim(std::size_t p, const BiDegree& deg) const { return static_cast<std::int64_t>(basis(p, deg).size()); }

 private:
  const BigradedRing& ring_;
  std::vector<std::vector<std::uint32_t>> h_;
};

/// Exact Ext dimensions between line bundles on the quotient stack, with a
/// per-difference memo shared across copies.
class ExtCalculator {
 public:
  explicit ExtCalculator(const GammaStructure& gs) : ring_(gs), ambient_(ring_), memo_(std::make_shared<Memo>()) {
    if (gs.n() != 5 || !gs.weights_all_one())
      throw Error(ErrorKind::UnsupportedGeometry,
                  "line bundle model requires n = 5 and q = (1, ..., 1); got n = " + std::to_string(gs.n()));
  }

  ExtCalculator(const ExtCalculator&) = delete;
  ExtCalculator& operator=(const ExtCalculator&) = delete;

  const BigradedRing& ring() const { return ring_; }

  /// H^i(Z, O(delta))^{Gbar} for i = 0 .. n - 2 via the divisor long exact sequence.
  ExtDims cohomology_les(const BiDegree& delta) const {
    {
      std::shared_lock lock(memo_->mutex);
      auto it = memo_->les.find(delta);
      if (it != memo_->les.end()) return it->second;
    }
    const std::size_t n = ring_.n();
    BiDegree shifted = ring_.sub(delta, ring_.w_degree());
    std::vector<std::int64_t> src(n, 0), dst(n, 0), rk(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      src[p] = ambient_.dim(p, shifted);
      dst[p] = ambient_.dim(p, delta);
      rk[p] = static_cast<std::int64_t>(ambient_.multiplication_rank(p, delta));
    }
    ExtDims out;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::int64_t coker = dst[i] - rk[i];
      std::int64_t ker_next = src[i + 1] - rk[i + 1];
      out.e.push_back(coker + ker_next);
    }
    std::unique_lock lock(memo_->mutex);
    memo_->les.emplace(delta, out);
    return out;
  }

  /// Ext^*(O(l1), O(l2)) via the long exact sequence.
  ExtDims ext_dims(const BiDegree& l1, const BiDegree& l2) const { return cohomology_les(ring_.sub(l2, l1)); }

  /// Ext^*(O(l1), O(l2)) from Hom counting and Serre duality with omega.
  ExtDims ext_dims_serre(const BiDegree& l1, const BiDegree& l2) const {
    BiDegree delta = ring_.sub(l2, l1);
    ExtDims out;
    out.e = {ring_.hom_dim(delta), 0, 0, ring_.hom_dim(ring_.sub(ring_.canonical(), delta))};
    return out;
  }

  /// Total dimension of Hom^*(O(l1), O(l2)).
  std::int64_t total_hom(const BiDegree& l1, const BiDegree& l2) const { return ext_dims(l1, l2).total(); }

 private:
  struct Memo {
    std::shared_mutex mutex;
    std::map<BiDegree, ExtDims> les;
  };
  BigradedRing ring_;
  AmbientCohomology ambient_;
  std::shared_ptr<Memo> memo_;
};

/// Representative monomial for each (a, b) with 0 <= a <= max_a and nonzero
/// Hom(O, O(a, b)): the lexicographically leading one (x1 > x2 > ... > xn).
struct Table1Cell {
  BiDegree degree;
  std::int64_t hom_dim = 0;
  std::optional<Monomial> representative;
};

inline std::vector<Table1Cell> table1(const BigradedRing& ring, std::int64_t max_a) {
  std::vector<Table1Cell> out;
  for (std::int64_t a = 0; a <= max_a; ++a)
    for (const auto& b : ring.all_characters()) {
      Table1Cell cell{BiDegree{a, b}, ring.hom_dim(BiDegree{a, b}), std::nullopt};
      if (cell.hom_dim > 0) {
        auto ms = ring.monomials_of(cell.degree);
        if (!ms.empty()) cell.representative = ms.front();
      }
      out.push_back(std::move(cell));
    }
  return out;
}

namespace detail {

inline std::string character_label(const std::vector<std::int64_t>& b) {
  std::string s;
  for (std::size_t k = 0; k < b.size(); ++k) s += (k ? ":" : "") + std::to_string(b[k]);
  return s;
}

}  // namespace detail

/// CSV grid: one row per a, one column per character b, entries dim Hom(O, O(a, b)).
inline std::string hom_table_csv(const BigradedRing& ring, std::int64_t max_a) {
  std::ostringstream os;
  auto chars = ring.all_characters();
  os << "a";
  for (const auto& b : chars) os << ",b=" << detail::character_label(b);
  os << '\n';
  for (std::int64_t a = 0; a <= max_a; ++a) {
    os << a;
    for (const auto& b : chars) os << ',' << ring.hom_dim(BiDegree{a, b});
    os << '\n';
  }
  return os.str();
}

/// Same grid with representative monomials, empty where Hom vanishes.
inline std::string table1_csv(const BigradedRing& ring, std::int64_t max_a) {
  std::ostringstream os;
  auto chars = ring.all_characters();
  os << "a";
  for (const auto& b : chars) os << ",b=" << detail::character_label(b);
  os << '\n';
  auto cells = table1(ring, max_a);
  std::size_t i = 0;
  for (std::int64_t a = 0; a <= max_a; ++a) {
    os << a;
    for (std::size_t c = 0; c < chars.size(); ++c, ++i)
      os << ',' << (cells[i].representative ? monomial_string(*cells[i].representative) : "");
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const ExtDims& e) { return e.e; }

/// JSON slice: Ext dims from O(source) to each target.
inline nlohmann::json ext_slice_json(const ExtCalculator& calc, const BiDegree& source,
                                     const std::vector<BiDegree>& targets) {
  auto arr = nlohmann::json::array();
  for (const auto& t : targets)
    arr.push_back({{"from", source.to_json()}, {"to", t.to_json()}, {"ext", calc.ext_dims(source, t).e}});
  return arr;
}

}  // namespace invpoly
