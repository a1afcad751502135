#pragma once

// Exact integer linear algebra: matrices over arbitrary-precision integers,
// Smith normal form with unimodular transforms, positive weight solving for
// quasihomogeneous exponent matrices, and extended-gcd splitting coefficients.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "invpoly/errors.hpp"

namespace invpoly {

using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational::backend_type,
                                               boost::multiprecision::et_off>;

inline Integer abs(const Integer& x) { return x < 0 ? Integer(-x) : x; }

/// Floor division for arbitrary signs.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Representative of a modulo m in [0, |m|).
inline Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += abs(m);
  return r;
}

inline Integer gcd(Integer a, Integer b) {
  a = abs(a);
  b = abs(b);
  while (b != 0) {
    Integer t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / gcd(a, b) * b);
}

struct ExtendedGcd {
  Integer g, x, y;  // x*a + y*b == g >= 0
};

inline ExtendedGcd extended_gcd(const Integer& a, const Integer& b) {
  if (b == 0) {
    if (a < 0) return {Integer(-a), Integer(-1), Integer(0)};
    return {a, Integer(1), Integer(0)};
  }
  Integer q = floor_div(a, b);
  auto [g, x, y] = extended_gcd(b, a - q * b);
  return {g, y, x - q * y};
}

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw Error(ErrorKind::InvalidArgument, "ragged matrix initializer");
      for (long long v : row) data_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows) {
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw Error(ErrorKind::InvalidArgument, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Integer> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += k * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& k) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const Integer& k) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
  }

  IntMatrix transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_diagonal() const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (i != j && (*this)(i, j) != 0) return false;
    return true;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<Integer> operator*(const IntMatrix& a, std::span<const Integer> v) {
    if (a.cols_ != v.size()) throw Error(ErrorKind::InvalidArgument, "matrix-vector shape mismatch");
    std::vector<Integer> out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  friend std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
      os << ']';
    }
    return os << ']';
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(const IntMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::NotSquare, "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

/// Solves m x = rhs over the rationals; nullopt when m is singular.
inline std::optional<std::vector<Rational>> solve_rational(const IntMatrix& m,
                                                           std::span<const Integer> rhs) {
  const std::size_t n = m.rows();
  if (!m.square() || rhs.size() != n) throw Error(ErrorKind::InvalidArgument, "solve shape mismatch");
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m(i, j));
    a[i][n] = Rational(rhs[i]);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

/// Rank over the rationals by fraction-free elimination.
inline std::size_t rank(IntMatrix a) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(r, p);
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      Integer g = gcd(a(r, c), a(i, c));
      Integer fr = a(i, c) / g, fi = a(r, c) / g;
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = a(i, j) * fi - a(r, j) * fr;
    }
    ++r;
  }
  return r;
}

/// U * M * V == D with U, V unimodular and D diagonal with d_1 | d_2 | ...
struct SnfDecomposition {
  IntMatrix U, D, V;

  std::vector<Integer> invariant_factors() const {
    std::vector<Integer> out;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) out.push_back(D(i, i));
    return out;
  }
};

namespace detail {

// Minimal nonzero |entry| in the trailing block starting at (t, t); ties go to
// the lexicographically first (row, col).
inline std::optional<std::pair<std::size_t, std::size_t>> snf_pivot(const IntMatrix& a, std::size_t t) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  Integer best_abs;
  for (std::size_t i = t; i < a.rows(); ++i)
    for (std::size_t j = t; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      Integer v = abs(a(i, j));
      if (!best || v < best_abs) {
        best = {i, j};
        best_abs = std::move(v);
      }
    }
  return best;
}

}  // namespace detail

/// Smith normal form by elementary row/column operations. Works for
/// rectangular input as well; D has the shape of M.
inline SnfDecomposition smith_normal_form(const IntMatrix& m) {
  IntMatrix a = m;
  IntMatrix u = IntMatrix::identity(m.rows());
  IntMatrix v = IntMatrix::identity(m.cols());
  const std::size_t steps = std::min(m.rows(), m.cols());

  for (std::size_t t = 0; t < steps; ++t) {
    for (;;) {
      auto piv = detail::snf_pivot(a, t);
      if (!piv) break;
      auto [pi, pj] = *piv;
      a.swap_rows(t, pi);
      u.swap_rows(t, pi);
      a.swap_cols(t, pj);
      v.swap_cols(t, pj);

      bool dirty = false;
      for (std::size_t i = t + 1; i < a.rows(); ++i) {
        if (a(i, t) == 0) continue;
        Integer q = floor_div(a(i, t), a(t, t));
        a.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (a(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < a.cols(); ++j) {
        if (a(t, j) == 0) continue;
        Integer q = floor_div(a(t, j), a(t, t));
        a.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (a(t, j) != 0) dirty = true;
      }
      if (dirty) continue;

      // Row and column are clear; enforce divisibility on the trailing block.
      std::optional<std::size_t> offending;
      for (std::size_t i = t + 1; i < a.rows() && !offending; ++i)
        for (std::size_t j = t + 1; j < a.cols(); ++j)
          if (a(i, j) % a(t, t) != 0) {
            offending = i;
            break;
          }
      if (!offending) break;
      a.add_row(t, *offending, 1);
      u.add_row(t, *offending, 1);
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
  }
  return {std::move(u), std::move(a), std::move(v)};
}

/// Inverse of a unimodular matrix (exact; throws if |det| != 1).
inline IntMatrix unimodular_inverse(const IntMatrix& m) {
  const std::size_t n = m.rows();
  IntMatrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Integer> e(n);
    e[c] = 1;
    auto x = solve_rational(m, e);
    if (!x) throw Error(ErrorKind::SingularMatrix, "matrix is not unimodular");
    for (std::size_t r = 0; r < n; ++r) {
      const Rational& q = (*x)[r];
      if (boost::multiprecision::denominator(q) != 1) throw Error(ErrorKind::InvalidArgument, "matrix is not unimodular");
      inv(r, c) = boost::multiprecision::numerator(q);
    }
  }
  return inv;
}

struct WeightSystem {
  std::vector<Integer> q;  // positive, gcd 1
  Integer d;               // A q == d (1, ..., 1)
};

/// Positive weights q with gcd 1 and degree d such that every row of A has
/// weighted degree d.
inline WeightSystem solve_positive_weights(const IntMatrix& a) {
  if (!a.square()) throw Error(ErrorKind::NotSquare, "exponent matrix must be square");
  const std::size_t n = a.rows();
  std::vector<Integer> ones(n, Integer(1));
  auto x = solve_rational(a, ones);
  if (!x) throw Error(ErrorKind::SingularMatrix, "exponent matrix is singular");

  Integer den = 1;
  for (const auto& r : *x) {
    if (r <= 0) throw Error(ErrorKind::NoPositiveWeights, "no strictly positive weight system exists");
    den = lcm(den, boost::multiprecision::denominator(r));
  }
  std::vector<Integer> q(n);
  Integer g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = boost::multiprecision::numerator(Rational((*x)[i] * den));
    g = gcd(g, q[i]);
  }
  for (auto& qi : q) qi /= g;
  // A (den x / g) = (den / g) * 1
  Integer d = den / g;
  return {std::move(q), std::move(d)};
}

namespace detail {

inline std::pair<Integer, Integer> split_key(std::span<const Integer> b) {
  Integer mx = 0, sum = 0;
  for (const auto& x : b) {
    Integer ax = abs(x);
    if (ax > mx) mx = ax;
    sum += ax;
  }
  return {mx, sum};
}

}  // namespace detail

/// Integers b with sum b_i q_i == 1. Extended gcd from the left, then a greedy
/// pass over the kernel vectors (q_j e_i - q_i e_j)/gcd(q_i, q_j) that accepts
/// a move only when it strictly lowers (max |b_i|, sum |b_i|). Pairs are tried
/// in lexicographic order, + before -.
inline std::vector<Integer> splitting_coefficients(std::span<const Integer> q) {
  if (q.empty()) throw Error(ErrorKind::GcdNotOne, "empty weight vector");
  std::vector<Integer> b(q.size());
  Integer g = q[0];
  b[0] = 1;
  for (std::size_t k = 1; k < q.size(); ++k) {
    if (abs(g) == 1) break;
    auto e = extended_gcd(g, q[k]);
    for (std::size_t i = 0; i < k; ++i) b[i] *= e.x;
    b[k] = e.y;
    g = e.g;
  }
  if (g < 0) {
    g = -g;
    for (auto& x : b) x = -x;
  }
  if (g != 1) throw Error(ErrorKind::GcdNotOne, "weights are not coprime");

  auto key = detail::split_key(b);
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < q.size() && !improved; ++i)
      for (std::size_t j = i + 1; j < q.size() && !improved; ++j) {
        Integer gij = gcd(q[i], q[j]);
        Integer vi = q[j] / gij, vj = q[i] / gij;
        for (int s : {1, -1}) {
          std::vector<Integer> c = b;
          c[i] += s * vi;
          c[j] -= s * vj;
          auto ck = detail::split_key(c);
          if (ck < key) {
            b = std::move(c);
            key = std::move(ck);
            improved = true;
            break;
          }
        }
      }
  }
  return b;
}

}  // namespace invpoly
