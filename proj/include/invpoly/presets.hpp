#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invpoly/invertible_poly.hpp"

namespace invpoly::presets {

// Cubic loop in five variables whose maximal diagonal quotient has no full
// exceptional collection of line bundles.
inline constexpr std::string_view kLuCounterexample = "x1^2*x2 + x2^2*x3 + x3^2*x4 + x4^2*x5 + x5^2*x1";

inline InvertiblePolynomial lu_counterexample() { return parse(kLuCounterexample); }

// A 24-object exceptional collection of line bundles O(a, b) on its quotient
// stack, in exceptional order.
inline std::vector<std::pair<std::int64_t, std::int64_t>> lu_sharp_collection() {
  return {{1, 2}, {1, 6}, {1, 7}, {1, 8}, {1, 10}, {2, 0}, {0, 0}, {1, 1}, {1, 3}, {1, 4}, {1, 5}, {1, 9},
          {2, 2}, {2, 6}, {2, 7}, {2, 8}, {2, 10}, {3, 0}, {1, 0}, {2, 1}, {2, 3}, {2, 4}, {2, 5}, {2, 9}};
}

inline const std::map<std::string, std::string, std::less<>>& all() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"lu-counterexample", std::string(kLuCounterexample)},
  };
  return table;
}

inline InvertiblePolynomial by_name(std::string_view name) {
  auto it = all().find(name);
  if (it == all().end()) throw Error(ErrorKind::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  return parse(it->second);
}

}  // namespace invpoly::presets
