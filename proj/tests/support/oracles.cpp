#include "oracles.hpp"

#include <algorithm>
#include <random>

namespace oracle {

using hetprice::Bundle;
using hetprice::revpref::Observation;

std::vector<std::vector<Rational>> cost_table(const std::vector<Observation>& obs) {
  std::vector<std::vector<Rational>> c(obs.size(), std::vector<Rational>(obs.size()));
  for (std::size_t t = 0; t < obs.size(); ++t) {
    for (std::size_t s = 0; s < obs.size(); ++s) {
      Rational v(0);
      for (std::size_t k = 0; k < obs[t].p.size(); ++k) v += obs[t].p[k] * obs[s].x[k];
      c[t][s] = v;
    }
  }
  return c;
}

namespace {

// Is there a simple weak chain from `from` to `target`? Depth-first over
// unvisited nodes.
bool chain(const std::vector<std::vector<bool>>& weak, std::size_t from, std::size_t target,
           std::vector<bool>& seen) {
  if (from == target) return true;
  seen[from] = true;
  for (std::size_t next = 0; next < weak.size(); ++next) {
    if (weak[from][next] && !seen[next] && chain(weak, next, target, seen)) return true;
  }
  return false;
}

}  // namespace

bool acyclic_by_chains(const std::vector<std::vector<bool>>& weak,
                       const std::vector<std::vector<bool>>& strict) {
  const std::size_t n = weak.size();
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      if (!strict[s][t]) continue;
      std::vector<bool> seen(n, false);
      if (chain(weak, t, s, seen)) return false;
    }
  }
  return true;
}

bool garp_by_chains(const std::vector<Observation>& obs) {
  auto c = cost_table(obs);
  const std::size_t n = obs.size();
  std::vector<std::vector<bool>> weak(n, std::vector<bool>(n)), strict = weak;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      weak[t][s] = c[t][t] >= c[t][s];
      strict[t][s] = c[t][t] > c[t][s];
    }
  }
  return acyclic_by_chains(weak, strict);
}

bool gapp_by_chains(const std::vector<hetprice::revpref::PricedBundle>& data) {
  const std::size_t n = data.size();
  std::vector<std::vector<bool>> weak(n, std::vector<bool>(n)), strict = weak;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      Rational lhs = data[t].f(data[s].x), rhs = data[s].f(data[s].x);
      weak[t][s] = lhs <= rhs;
      strict[t][s] = lhs < rhs;
    }
  }
  return acyclic_by_chains(weak, strict);
}

bool afriat_ok(const hetprice::revpref::AfriatSolution& sol, const std::vector<Observation>& obs) {
  auto c = cost_table(obs);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (!sol.multipliers[t].is_positive()) return false;
    for (std::size_t s = 0; s < obs.size(); ++s) {
      if (sol.levels[s] > sol.levels[t] + sol.multipliers[t] * (c[t][s] - c[t][t])) return false;
    }
  }
  return true;
}

bool rum_by_enumeration(const hetprice::CrossSection& cs) {
  const std::size_t t_count = cs.observations(), n = cs.points_per_observation();
  std::vector<std::vector<std::size_t>> perm(t_count, std::vector<std::size_t>(n));
  for (auto& p : perm) {
    for (std::size_t j = 0; j < n; ++j) p[j] = j;
  }
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      std::vector<Observation> stream;
      for (std::size_t t = 0; t < t_count; ++t) stream.push_back({cs.bundle(t, perm[t][i]), cs.at(t).pbar});
      ok = garp_by_chains(stream);
    }
    if (ok) return true;
    std::size_t t = 0;
    while (t < t_count && !std::next_permutation(perm[t].begin(), perm[t].end())) ++t;
    if (t == t_count) return false;
  }
}

hetprice::PanelDataset random_panel(std::uint64_t seed, std::size_t n, std::size_t t, std::size_t k) {
  std::mt19937_64 gen(seed);
  const Rational prices[] = {Rational(1, 2), Rational(1), Rational(3, 2), Rational(2), Rational(3)};
  RationalVector e, pbar;
  for (std::size_t j = 0; j < t * k; ++j) pbar.push_back(prices[gen() % 5]);
  for (std::size_t j = 0; j < n * t * k; ++j) e.push_back(Rational(static_cast<long>(gen() % 9 + 1)));
  return hetprice::PanelDataset(n, t, k, std::move(e), std::move(pbar));
}

std::vector<Observation> at_prices(const hetprice::PanelDataset& panel, std::size_t i,
                                   const std::function<RationalVector(std::size_t)>& prices) {
  std::vector<Observation> out;
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    RationalVector p = prices(t);
    RationalVector x;
    for (std::size_t k = 0; k < panel.goods(); ++k) x.push_back(panel.expenditure(i, t)[k] / p[k]);
    out.push_back({Bundle(std::move(x)), std::move(p)});
  }
  return out;
}

}  // namespace oracle
