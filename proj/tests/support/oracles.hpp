#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hetprice/dataset.hpp"
#include "hetprice/revpref.hpp"

// Slow, independent re-implementations used as test oracles. None of these
// call into the library's relation or closure code.
namespace oracle {

using hetprice::Rational;
using hetprice::RationalVector;

// C[t][s] = p^t . x^s computed term by term.
std::vector<std::vector<Rational>> cost_table(const std::vector<hetprice::revpref::Observation>& obs);

// GARP by enumerating every simple chain of weak direct edges; no closure.
bool garp_by_chains(const std::vector<hetprice::revpref::Observation>& obs);

// Same enumeration over an arbitrary pair of relations.
bool acyclic_by_chains(const std::vector<std::vector<bool>>& weak,
                       const std::vector<std::vector<bool>>& strict);

// GAPP relation by direct evaluation: t weakly over s iff f^t(x^s) <= f^s(x^s).
bool gapp_by_chains(const std::vector<hetprice::revpref::PricedBundle>& data);

// U^s <= U^t + mult^t p^t.(x^s - x^t) for all s, t, multipliers positive.
bool afriat_ok(const hetprice::revpref::AfriatSolution& sol,
               const std::vector<hetprice::revpref::Observation>& obs);

// Every sorting of the cross-section, first observation included, checked
// with garp_by_chains per stream.
bool rum_by_enumeration(const hetprice::CrossSection& cs);

// Small random panel with integer expenditures in [1, 9] and prices in
// {1/2, 1, 3/2, 2, 3}; drawn with std::mt19937_64 directly.
hetprice::PanelDataset random_panel(std::uint64_t seed, std::size_t n, std::size_t t, std::size_t k);

// Observations of one consumer at explicit prices [t][k].
std::vector<hetprice::revpref::Observation> at_prices(const hetprice::PanelDataset& panel, std::size_t i,
                                                      const std::function<RationalVector(std::size_t)>& prices);

}  // namespace oracle
