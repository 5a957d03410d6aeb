#include "hetprice/revpref.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hetprice/errors.hpp"

namespace hetprice::revpref {

namespace {

using BoolMatrix = std::vector<std::vector<bool>>;

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct Closure {
  BoolMatrix reach;
  std::vector<std::vector<std::size_t>> next;
};

// Reflexive-transitive closure of the weak relation with first-hop tracking
// so that paths can be replayed.
Closure weak_closure(const RevealedPreferenceGraph& g) {
  const std::size_t n = g.size();
  Closure c{BoolMatrix(n, std::vector<bool>(n, false)),
            std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(n, kNone))};
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      if (t == s || g.weak(t, s)) {
        c.reach[t][s] = true;
        c.next[t][s] = s;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!c.reach[i][j] && c.reach[k][j]) {
          c.reach[i][j] = true;
          c.next[i][j] = c.next[i][k];
        }
      }
    }
  }
  return c;
}

std::vector<std::size_t> replay_path(const Closure& c, std::size_t from, std::size_t to) {
  std::vector<std::size_t> path{from};
  std::size_t u = from;
  while (u != to) {
    u = c.next[u][to];
    path.push_back(u);
  }
  return path;
}

}  // namespace

std::vector<Observation> observations_at_pbar(const PanelDataset& panel, std::size_t i) {
  std::vector<Observation> obs;
  obs.reserve(panel.observations());
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    auto p = panel.pbar(t);
    obs.push_back({panel.bundle_at_pbar(i, t), RationalVector(p.begin(), p.end())});
  }
  return obs;
}

std::vector<Observation> pooled_observations(const PanelDataset& panel,
                                             const HeterogeneousPrices& prices) {
  prices.check_against(panel);
  std::vector<Observation> obs;
  obs.reserve(panel.consumers() * panel.observations());
  for (std::size_t i = 0; i < panel.consumers(); ++i) {
    for (std::size_t t = 0; t < panel.observations(); ++t) {
      auto p = prices.at(i, t);
      obs.push_back({implied_bundle(panel.expenditure(i, t), p), RationalVector(p.begin(), p.end())});
    }
  }
  return obs;
}

RevealedPreferenceGraph::RevealedPreferenceGraph(std::vector<std::vector<bool>> weak,
                                                 std::vector<std::vector<bool>> strict,
                                                 Matrix values)
    : weak_(std::move(weak)), strict_(std::move(strict)), values_(std::move(values)) {
  const std::size_t n = weak_.size();
  if (strict_.size() != n) throw DomainError("relation matrices differ in size");
  for (std::size_t t = 0; t < n; ++t) {
    if (weak_[t].size() != n || strict_[t].size() != n) {
      throw DomainError("relation matrices must be square");
    }
  }
}

RevealedPreferenceGraph direct_relations(std::span<const Observation> obs) {
  const std::size_t n = obs.size();
  Matrix cost(n, std::vector<Rational>(n));
  for (std::size_t t = 0; t < n; ++t) {
    if (obs[t].p.size() != obs[t].x.size()) throw DomainError("price and bundle lengths differ");
    for (std::size_t s = 0; s < n; ++s) {
      if (obs[s].x.size() != obs[t].p.size()) throw DomainError("observations differ in dimension");
      cost[t][s] = dot(obs[t].p, obs[s].x.values());
    }
  }
  BoolMatrix weak(n, std::vector<bool>(n)), strict(n, std::vector<bool>(n));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      weak[t][s] = cost[t][t] >= cost[t][s];
      strict[t][s] = cost[t][t] > cost[t][s];
    }
  }
  return RevealedPreferenceGraph(std::move(weak), std::move(strict), std::move(cost));
}

GarpVerdict check_acyclic(const RevealedPreferenceGraph& g) {
  GarpVerdict v;
  v.values = g.values();
  const std::size_t n = g.size();
  Closure c = weak_closure(g);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      if (c.reach[t][s] && g.strict(s, t)) {
        std::vector<std::size_t> w = replay_path(c, t, s);
        w.push_back(t);
        v.satisfied = false;
        v.witness = std::move(w);
        return v;
      }
    }
  }
  return v;
}

GarpVerdict check_garp(std::span<const Observation> obs) {
  return check_acyclic(direct_relations(obs));
}

bool witness_replays(const RevealedPreferenceGraph& g, std::span<const std::size_t> witness) {
  if (witness.size() < 2 || witness.front() != witness.back()) return false;
  bool any_strict = false;
  for (std::size_t k = 0; k + 1 < witness.size(); ++k) {
    std::size_t a = witness[k], b = witness[k + 1];
    if (a >= g.size() || b >= g.size() || !g.weak(a, b)) return false;
    any_strict = any_strict || g.strict(a, b);
  }
  return any_strict;
}

PriceSystem::PriceSystem(Evaluator f, PriceSystemTag tag) : f_(std::move(f)), tag_(std::move(tag)) {}

PriceSystem PriceSystem::linear(RationalVector p) {
  for (const auto& v : p) {
    if (!v.is_positive()) throw NonPositivePrice("linear price system needs positive prices");
  }
  RationalVector copy = p;
  return PriceSystem([q = std::move(copy)](const Bundle& x) { return dot(q, x.values()); },
                     LinearTag{std::move(p)});
}

RevealedPreferenceGraph price_preference_relations(std::span<const PricedBundle> data) {
  const std::size_t n = data.size();
  Matrix f(n, std::vector<Rational>(n));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) f[t][s] = data[t].f(data[s].x);
  }
  BoolMatrix weak(n, std::vector<bool>(n)), strict(n, std::vector<bool>(n));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      weak[t][s] = f[t][s] <= f[s][s];
      strict[t][s] = f[t][s] < f[s][s];
    }
  }
  return RevealedPreferenceGraph(std::move(weak), std::move(strict), std::move(f));
}

GarpVerdict check_gapp(std::span<const PricedBundle> data) {
  return check_acyclic(price_preference_relations(data));
}

AfriatSolution afriat_construct(std::span<const Observation> obs) {
  const std::size_t n = obs.size();
  RevealedPreferenceGraph g = direct_relations(obs);
  GarpVerdict verdict = check_acyclic(g);
  if (!verdict.satisfied) {
    throw GarpViolation("observations violate GARP; no Afriat solution exists", *verdict.witness);
  }
  const Matrix& cost = g.values();
  auto slack = [&](std::size_t t, std::size_t s) { return cost[t][s] - cost[t][t]; };

  Closure c = weak_closure(g);
  // Components of mutual weak reachability, most preferred first: a component
  // that reaches another reaches strictly more nodes.
  std::vector<std::size_t> comp(n, kNone);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t t = 0; t < n; ++t) {
    if (comp[t] != kNone) continue;
    members.emplace_back();
    for (std::size_t s = t; s < n; ++s) {
      if (c.reach[t][s] && c.reach[s][t]) {
        comp[s] = members.size() - 1;
        members.back().push_back(s);
      }
    }
  }
  std::vector<std::size_t> reach_count(members.size(), 0);
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::size_t rep = members[m][0];
    for (std::size_t s = 0; s < n; ++s) reach_count[m] += c.reach[rep][s] ? 1 : 0;
  }
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reach_count[a] > reach_count[b]; });

  AfriatSolution sol{RationalVector(n), RationalVector(n)};
  std::vector<std::size_t> assigned;
  for (std::size_t m : order) {
    Rational level = 0;
    bool first = true;
    for (std::size_t t : assigned) {
      for (std::size_t s : members[m]) {
        Rational bound = sol.levels[t] + sol.multipliers[t] * slack(t, s);
        if (first || bound < level) level = bound;
        first = false;
      }
    }
    for (std::size_t t : members[m]) {
      sol.levels[t] = level;
      Rational mult = 1;
      for (std::size_t s : assigned) {
        Rational d = slack(t, s);
        if (!d.is_positive()) throw std::logic_error("Afriat ordering produced a backward weak edge");
        Rational need = (sol.levels[s] - level) / d;
        if (need > mult) mult = need;
      }
      sol.multipliers[t] = mult;
    }
    assigned.insert(assigned.end(), members[m].begin(), members[m].end());
  }
  return sol;
}

bool afriat_inequalities_hold(const AfriatSolution& sol, std::span<const Observation> obs) {
  const std::size_t n = obs.size();
  if (sol.levels.size() != n || sol.multipliers.size() != n) return false;
  for (std::size_t t = 0; t < n; ++t) {
    if (!sol.multipliers[t].is_positive()) return false;
    Rational own = dot(obs[t].p, obs[t].x.values());
    for (std::size_t s = 0; s < n; ++s) {
      Rational rhs = sol.levels[t] + sol.multipliers[t] * (dot(obs[t].p, obs[s].x.values()) - own);
      if (sol.levels[s] > rhs) return false;
    }
  }
  return true;
}

Rational evaluate_afriat(const AfriatSolution& sol, std::span<const Observation> obs,
                         std::span<const Rational> x) {
  if (obs.empty()) throw DomainError("Afriat utility over an empty dataset");
  Rational best;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    Rational v = sol.levels[t] +
                 sol.multipliers[t] * (dot(obs[t].p, x) - dot(obs[t].p, obs[t].x.values()));
    if (t == 0 || v < best) best = std::move(v);
  }
  return best;
}

}  // namespace hetprice::revpref
