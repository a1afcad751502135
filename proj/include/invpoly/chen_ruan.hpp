#pragma once

// Dimension of Chen-Ruan cohomology of [({w = 0} \ 0) / Gamma_w] for cubic
// threefolds, as untwisted invariants plus twisted sectors over <Gbar, tau>.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "invpoly/errors.hpp"
#include "invpoly/symmetry.hpp"

namespace invpoly {

struct Sector {
  DiagonalElement element;
  std::vector<std::int64_t> word;  // exponents of the Gbar generators, then of tau
  std::vector<std::size_t> fixed_coords;  // 0-based
  std::int64_t contribution = 0;

  nlohmann::json to_json() const {
    std::vector<std::size_t> fixed1;
    for (auto i : fixed_coords) fixed1.push_back(i + 1);
    return {{"phases", element.to_json()}, {"word", word}, {"fixed_coords", fixed1}, {"contribution", contribution}};
  }
};

namespace detail {

inline void require_unit_weights(const GammaStructure& gs) {
  if (!gs.weights_all_one())
    throw Error(ErrorKind::UnsupportedGeometry, "sector model requires q = (1, ..., 1)");
}

inline void require_cubic_threefold(const GammaStructure& gs) {
  require_unit_weights(gs);
  if (gs.n() != 5 || gs.degree() != 3)
    throw Error(ErrorKind::UnsupportedGeometry, "residue model requires a cubic in five variables");
}

inline bool is_zero_character(const std::vector<std::int64_t>& c) {
  for (auto x : c)
    if (x != 0) return false;
  return true;
}

// Every monomial of w involves a variable outside `fixed`.
inline bool w_vanishes_on(const IntMatrix& a, const std::vector<std::size_t>& fixed) {
  std::vector<bool> in(a.cols(), false);
  for (auto i : fixed) in[i] = true;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    bool outside = false;
    for (std::size_t j = 0; j < a.cols() && !outside; ++j) outside = a(r, j) != 0 && !in[j];
    if (!outside) return false;
  }
  return true;
}

}  // namespace detail

/// Nonidentity elements of <Gbar, tau> with their fixed loci. Elements whose
/// fixed locus is a point contribute 1 when that point lies on {w = 0}.
inline std::vector<Sector> enumerate_sectors(const GammaStructure& gs) {
  detail::require_unit_weights(gs);
  const std::size_t n = gs.n();
  std::vector<DiagonalElement> gens = gs.gbar.generators;
  std::vector<std::int64_t> orders;
  for (const auto& f : gs.gbar.invariant_factors) orders.push_back(f.convert_to<std::int64_t>());
  gens.push_back(scalar_tau(gs));
  orders.push_back(gens.back().order().convert_to<std::int64_t>());

  std::vector<Sector> out;
  std::set<DiagonalElement> seen;
  std::vector<std::int64_t> word(gens.size(), 0);
  for (;;) {
    DiagonalElement g = DiagonalElement::identity(n);
    for (std::size_t k = 0; k < gens.size(); ++k) g = g * gens[k].pow(word[k]);
    if (!g.is_identity() && seen.insert(g).second) {
      Sector s{g, word, {}, 0};
      for (std::size_t i = 0; i < n; ++i)
        if (g.fixes(i)) s.fixed_coords.push_back(i);
      if (s.fixed_coords.size() == 1) {
        s.contribution = detail::w_vanishes_on(gs.exponents, s.fixed_coords) ? 1 : 0;
      } else if (s.fixed_coords.size() > 1) {
        throw Error(ErrorKind::NotImplemented,
                    "twisted sector " + g.to_string() + " has a positive-dimensional fixed locus");
      }
      out.push_back(std::move(s));
    }
    std::size_t k = 0;
    while (k < word.size() && ++word[k] == orders[k]) word[k++] = 0;
    if (k == word.size()) break;
  }
  return out;
}

/// h^{2,1} of the cubic threefold Z_w: the degree-1 piece of the Jacobian ring.
inline std::int64_t h21(const GammaStructure& gs) {
  detail::require_cubic_threefold(gs);
  return static_cast<std::int64_t>(gs.n());
}

/// Gbar-invariant part of H^*(Z_w): the four hyperplane powers plus invariant
/// residues Q Omega_0 / w^2 with deg Q = 1, doubled for H^{1,2}.
inline std::int64_t untwisted_invariants(const GammaStructure& gs) {
  detail::require_cubic_threefold(gs);
  if (!detail::is_zero_character(gs.w_character()) || !detail::is_zero_character(gs.omega_character()))
    throw Error(ErrorKind::UnsupportedGeometry, "w and Omega_0 must both be Gbar-invariant");
  std::int64_t invariant = 0;
  for (std::size_t i = 0; i < gs.n(); ++i)
    if (detail::is_zero_character(gs.characters[i])) ++invariant;
  return 4 + 2 * invariant;
}

inline std::int64_t chen_ruan_dim(const GammaStructure& gs) {
  std::int64_t total = untwisted_invariants(gs);
  for (const auto& s : enumerate_sectors(gs)) total += s.contribution;
  return total;
}

inline nlohmann::json chen_ruan_report(const GammaStructure& gs) {
  auto sectors = enumerate_sectors(gs);
  auto arr = nlohmann::json::array();
  std::int64_t twisted = 0;
  for (const auto& s : sectors) {
    twisted += s.contribution;
    if (s.contribution > 0) arr.push_back(s.to_json());
  }
  const std::int64_t untwisted = untwisted_invariants(gs);
  return {{"untwisted", untwisted},
          {"h21", h21(gs)},
          {"sector_group_order", sectors.size() + 1},
          {"twisted", twisted},
          {"contributing_sectors", arr},
          {"total", untwisted + twisted}};
}

}  // namespace invpoly
