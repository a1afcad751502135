#pragma once

// Invertible polynomials w = sum_i prod_j x_j^{a_ij}: parsing, validation of
// the square/nonsingular/positive-weight conditions, and decomposition into
// Fermat, loop and chain blocks as a quasi-smoothness certificate.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invpoly/errors.hpp"
#include "invpoly/integer_lattice.hpp"

namespace invpoly {

enum class BlockKind { Fermat, Loop, Chain };

constexpr std::string_view to_string(BlockKind k) {
  switch (k) {
    case BlockKind::Fermat: return "Fermat";
    case BlockKind::Loop: return "Loop";
    case BlockKind::Chain: return "Chain";
  }
  return "?";
}

/// One atomic summand. `variables[t]` is the principal variable of the t-th
/// monomial of the block and `rows[t]` the index of that monomial in the full
/// exponent matrix; `exponents[t]` is the exponent of the principal variable.
/// Monomial t is x_{v_t}^{a_t} x_{v_{t+1}} (cyclically for loops, with the
/// last chain monomial a pure power).
struct AtomicBlock {
  BlockKind kind;
  std::vector<Integer> exponents;
  std::vector<std::size_t> variables;
  std::vector<std::size_t> rows;

  friend bool operator==(const AtomicBlock&, const AtomicBlock&) = default;
};

struct AtomicDecomposition {
  std::vector<AtomicBlock> blocks;
};

/// Exponent matrix of a block in its own local ordering.
inline IntMatrix block_matrix(const AtomicBlock& blk) {
  const std::size_t k = blk.exponents.size();
  IntMatrix m(k, k);
  for (std::size_t t = 0; t < k; ++t) {
    m(t, t) = blk.exponents[t];
    if (blk.kind == BlockKind::Loop) {
      if (k == 1) throw Error(ErrorKind::InvalidArgument, "loop of length 1");
      m(t, (t + 1) % k) += 1;
    } else if (blk.kind == BlockKind::Chain && t + 1 < k) {
      m(t, t + 1) = 1;
    }
  }
  return m;
}

inline IntMatrix loop_matrix(std::span<const Integer> a) {
  return block_matrix(AtomicBlock{BlockKind::Loop, {a.begin(), a.end()}, {}, {}});
}

class InvertiblePolynomial {
 public:
  /// Validates square shape, nonnegative entries, nonsingularity, variable
  /// coverage and the existence of positive weights.
  explicit InvertiblePolynomial(IntMatrix exponents) : a_(std::move(exponents)) {
    if (!a_.square())
      throw Error(ErrorKind::NotSquare, std::to_string(a_.rows()) + " monomials in " +
                                            std::to_string(a_.cols()) + " variables");
    if (a_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty polynomial");
    for (std::size_t i = 0; i < a_.rows(); ++i)
      for (std::size_t j = 0; j < a_.cols(); ++j)
        if (a_(i, j) < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
    for (std::size_t j = 0; j < a_.cols(); ++j) {
      bool seen = false;
      for (std::size_t i = 0; i < a_.rows(); ++i) seen = seen || a_(i, j) != 0;
      if (!seen) throw Error(ErrorKind::InvalidArgument, "variable x" + std::to_string(j + 1) + " does not appear");
    }
    det_ = determinant(a_);
    if (det_ == 0) throw Error(ErrorKind::SingularMatrix, "exponent matrix is singular");
    weights_ = solve_positive_weights(a_);
  }

  std::size_t n() const noexcept { return a_.rows(); }
  const IntMatrix& exponents() const noexcept { return a_; }
  const std::vector<Integer>& q() const noexcept { return weights_.q; }
  const Integer& d() const noexcept { return weights_.d; }
  const Integer& det() const noexcept { return det_; }

  bool all_weights_one() const {
    for (const auto& x : weights_.q)
      if (x != 1) return false;
    return true;
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < n(); ++i) {
      if (i) os << " + ";
      bool first = true;
      for (std::size_t j = 0; j < n(); ++j) {
        if (a_(i, j) == 0) continue;
        if (!first) os << '*';
        first = false;
        os << 'x' << (j + 1);
        if (a_(i, j) != 1) os << '^' << a_(i, j);
      }
    }
    return os.str();
  }

  nlohmann::json matrix_json() const {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < n(); ++i) {
      auto r = nlohmann::json::array();
      for (std::size_t j = 0; j < n(); ++j) r.push_back(a_(i, j).convert_to<long long>());
      rows.push_back(std::move(r));
    }
    return {{"matrix", std::move(rows)}};
  }

 private:
  IntMatrix a_;
  Integer det_;
  WeightSystem weights_;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  // Each monomial as a map variable index (1-based) -> exponent.
  std::vector<std::map<std::size_t, Integer>> parse() {
    std::vector<std::map<std::size_t, Integer>> terms;
    terms.push_back(term());
    while (skip_ws(), pos_ < s_.size()) {
      expect('+');
      terms.push_back(term());
    }
    return terms;
  }

 private:
  std::map<std::size_t, Integer> term() {
    std::map<std::size_t, Integer> mono;
    skip_ws();
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t at = pos_;
      Integer coeff = posint();
      if (coeff != 1) fail("non-unit coefficient " + coeff.str() + " (coefficients must be 1)", at);
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '*') fail("expected '*' after coefficient", pos_);
      ++pos_;
    }
    factor(mono);
    while (skip_ws(), pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      factor(mono);
    }
    return mono;
  }

  void factor(std::map<std::size_t, Integer>& mono) {
    skip_ws();
    std::size_t at = pos_;
    if (pos_ >= s_.size() || s_[pos_] != 'x') fail("expected variable 'x<k>'", at);
    ++pos_;
    Integer idx = posint();
    if (idx > 4096) fail("variable index too large", at);
    Integer e = 1;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      e = posint();
    }
    mono[idx.convert_to<std::size_t>()] += e;
  }

  Integer posint() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected positive integer", start);
    Integer v(std::string(s_.substr(start, pos_ - start)));
    if (v == 0) fail("expected positive integer", start);
    return v;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw Error(ErrorKind::SyntaxError, msg + " at offset " + std::to_string(at));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses "x1^2*x2 + x2^2*x3 + ...". Rows follow textual order.
inline InvertiblePolynomial parse(std::string_view text) {
  auto terms = detail::PolyParser(text).parse();
  std::size_t nvars = 0;
  for (const auto& t : terms)
    for (const auto& [v, e] : t) nvars = std::max(nvars, v);
  if (terms.size() != nvars)
    throw Error(ErrorKind::NotSquare, std::to_string(terms.size()) + " monomials in " + std::to_string(nvars) +
                                          " variables");
  IntMatrix a(terms.size(), nvars);
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (const auto& [v, e] : terms[i]) a(i, v - 1) = e;
  return InvertiblePolynomial(std::move(a));
}

/// Accepts {"matrix": [[...], ...]}.
inline InvertiblePolynomial from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("matrix") || !j["matrix"].is_array())
    throw Error(ErrorKind::SyntaxError, "expected {\"matrix\": [[...], ...]}");
  std::vector<std::vector<Integer>> rows;
  for (const auto& r : j["matrix"]) {
    if (!r.is_array()) throw Error(ErrorKind::SyntaxError, "matrix rows must be arrays");
    std::vector<Integer> row;
    for (const auto& x : r) {
      if (!x.is_number_integer()) throw Error(ErrorKind::SyntaxError, "matrix entries must be integers");
      row.emplace_back(x.get<long long>());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::SyntaxError, "empty matrix");
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw Error(ErrorKind::NotSquare, "ragged exponent matrix");
  return InvertiblePolynomial(IntMatrix::from_rows(rows));
}

namespace detail {

struct Assignment {
  std::vector<std::size_t> principal;                 // row -> principal variable
  std::vector<std::optional<std::size_t>> secondary;  // row -> other variable (exponent 1)
};

// Backtracking over principal-variable choices. Rows may hold at most two
// variables; a non-principal variable must carry exponent 1 and may feed at
// most one other monomial.
inline bool assign_rows(const IntMatrix& a, std::size_t row, std::vector<bool>& used_principal,
                        std::vector<bool>& used_secondary, Assignment& out) {
  const std::size_t n = a.rows();
  if (row == n) return true;
  std::vector<std::size_t> vars;
  for (std::size_t j = 0; j < n; ++j)
    if (a(row, j) != 0) vars.push_back(j);
  if (vars.empty() || vars.size() > 2) return false;

  // Prefer the variable with exponent >= 2, then the lower index.
  std::vector<std::size_t> order = vars;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return (a(row, x) >= 2) > (a(row, y) >= 2);
  });
  for (std::size_t p : order) {
    if (used_principal[p]) continue;
    std::optional<std::size_t> s;
    if (vars.size() == 2) {
      s = vars[0] == p ? vars[1] : vars[0];
      if (a(row, *s) != 1 || used_secondary[*s]) continue;
    }
    used_principal[p] = true;
    if (s) used_secondary[*s] = true;
    out.principal[row] = p;
    out.secondary[row] = s;
    if (assign_rows(a, row + 1, used_principal, used_secondary, out)) return true;
    used_principal[p] = false;
    if (s) used_secondary[*s] = false;
  }
  return false;
}

}  // namespace detail

/// Splits w into Fermat x^a, loop and chain summands on disjoint variables.
/// Throws NotAtomicSum if no such decomposition exists.
inline AtomicDecomposition atomic_decomposition(const InvertiblePolynomial& p) {
  const IntMatrix& a = p.exponents();
  const std::size_t n = p.n();
  detail::Assignment asg{std::vector<std::size_t>(n), std::vector<std::optional<std::size_t>>(n)};
  std::vector<bool> used_p(n, false), used_s(n, false);
  if (!detail::assign_rows(a, 0, used_p, used_s, asg))
    throw Error(ErrorKind::NotAtomicSum, "no Fermat/loop/chain decomposition of " + p.to_string());

  std::vector<std::size_t> row_of(n);
  for (std::size_t r = 0; r < n; ++r) row_of[asg.principal[r]] = r;
  // Variable v feeds into next[v] (its monomial's secondary variable).
  std::vector<std::optional<std::size_t>> next(n);
  std::vector<bool> has_pred(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    next[asg.principal[r]] = asg.secondary[r];
    if (asg.secondary[r]) has_pred[*asg.secondary[r]] = true;
  }

  AtomicDecomposition out;
  std::vector<bool> done(n, false);
  auto emit = [&](BlockKind kind, std::size_t start) {
    AtomicBlock blk{kind, {}, {}, {}};
    std::size_t v = start;
    for (;;) {
      done[v] = true;
      blk.variables.push_back(v);
      blk.rows.push_back(row_of[v]);
      blk.exponents.push_back(a(row_of[v], v));
      if (!next[v] || *next[v] == start) break;
      v = *next[v];
    }
    if (kind != BlockKind::Loop && blk.variables.size() == 1) blk.kind = BlockKind::Fermat;
    out.blocks.push_back(std::move(blk));
  };
  // Chains and Fermats start at variables nothing feeds into.
  for (std::size_t v = 0; v < n; ++v)
    if (!has_pred[v]) emit(BlockKind::Chain, v);
  // What remains is a union of cycles; start each loop at its lowest variable.
  for (std::size_t v = 0; v < n; ++v)
    if (!done[v]) emit(BlockKind::Loop, v);

  std::stable_sort(out.blocks.begin(), out.blocks.end(),
                   [](const AtomicBlock& x, const AtomicBlock& y) { return x.variables.front() < y.variables.front(); });
  return out;
}

/// Rebuilds the full exponent matrix from the blocks.
inline IntMatrix reassemble(const AtomicDecomposition& dec, std::size_t n) {
  IntMatrix m(n, n);
  for (const auto& blk : dec.blocks) {
    IntMatrix local = block_matrix(blk);
    for (std::size_t s = 0; s < blk.variables.size(); ++s)
      for (std::size_t t = 0; t < blk.variables.size(); ++t)
        m(blk.rows[s], blk.variables[t]) = local(s, t);
  }
  return m;
}

inline std::string to_string(const AtomicBlock& blk) {
  std::ostringstream os;
  os << to_string(blk.kind) << '(';
  for (std::size_t i = 0; i < blk.exponents.size(); ++i) os << (i ? "," : "") << blk.exponents[i];
  return os.str() + ")";
}

inline std::string to_string(const AtomicDecomposition& dec) {
  std::string s;
  for (const auto& b : dec.blocks) s += (s.empty() ? "" : " + ") + to_string(b);
  return s;
}

/// Single-loop polynomial x1^a1*x2 + ... + xn^an*x1.
inline InvertiblePolynomial loop_polynomial(std::span<const Integer> a) {
  return InvertiblePolynomial(loop_matrix(a));
}

}  // namespace invpoly
