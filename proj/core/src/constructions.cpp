#include "hetprice/constructions.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "hetprice/errors.hpp"

namespace hetprice::constructions {

namespace {

using aggregators::AggregatorSpec;
using aggregators::Regularity;

constexpr int kMaxRetries = 60;
constexpr int kThresholdSteps = 1024;
constexpr int kScaleAdjustSteps = 10;
constexpr int kNormalizationRounds = 64;

BoundEntry entry(std::string description, Rational lhs, Relation rel, Rational rhs) {
  return BoundEntry{std::move(description), std::move(lhs), rel, std::move(rhs)};
}

std::string ix(std::size_t v) { return std::to_string(v + 1); }

// Smallest p^a.x^b - p^a.x^a over pooled pairs a < b; positive means no weak
// edge points from an earlier to a later observation.
Rational forward_margin(const revpref::Matrix& cost) {
  Rational best;
  bool first = true;
  for (std::size_t a = 0; a < cost.size(); ++a) {
    for (std::size_t b = a + 1; b < cost.size(); ++b) {
      Rational d = cost[a][b] - cost[a][a];
      if (first || d < best) best = d;
      first = false;
    }
  }
  return first ? Rational(1) : best;
}

void require_garp_per_consumer(const PanelDataset& panel) {
  for (std::size_t i = 0; i < panel.consumers(); ++i) {
    auto obs = revpref::observations_at_pbar(panel, i);
    auto v = revpref::check_garp(obs);
    if (!v.satisfied) {
      throw PreconditionError("consumer " + ix(i) + " violates GARP at the benchmark prices", i,
                              v.witness);
    }
  }
}

}  // namespace

bool BoundEntry::holds() const {
  switch (relation) {
    case Relation::less: return lhs < rhs;
    case Relation::less_equal: return lhs <= rhs;
    case Relation::equal: return lhs == rhs;
    case Relation::greater_equal: return lhs >= rhs;
    case Relation::greater: return lhs > rhs;
  }
  return false;
}

bool ConstructionParams::all_bounds_hold() const {
  return std::all_of(bound_log.begin(), bound_log.end(), [](const BoundEntry& b) { return b.holds(); });
}

AggregatorGrid::AggregatorGrid(std::size_t observations, std::size_t goods,
                               std::vector<AggregatorSpec> specs)
    : t_(observations), k_(goods), specs_(std::move(specs)) {
  if (specs_.size() != t_ * k_) throw ConfigError("aggregator grid has the wrong size");
}

AggregatorGrid AggregatorGrid::uniform(const AggregatorSpec& w, std::size_t observations,
                                       std::size_t goods) {
  return AggregatorGrid(observations, goods, std::vector<AggregatorSpec>(observations * goods, w));
}

AggregatorGrid AggregatorGrid::expenditure_weighted_harmonic(const PanelDataset& panel) {
  std::vector<AggregatorSpec> specs;
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    for (std::size_t k = 0; k < panel.goods(); ++k) {
      RationalVector w;
      for (std::size_t i = 0; i < panel.consumers(); ++i) w.push_back(panel.expenditure(i, t)[k]);
      if (sum(w).is_positive()) {
        specs.push_back(AggregatorSpec::weighted_harmonic(std::move(w)));
      } else {
        // Nobody buys good k at t; its price is never solved for.
        specs.push_back(AggregatorSpec::harmonic_mean(panel.consumers()));
      }
    }
  }
  return AggregatorGrid(panel.observations(), panel.goods(), std::move(specs));
}

RationalVector StableScale::beta() const {
  RationalVector b;
  for (const auto& l : lambda) b.push_back(l.inverse());
  return b;
}

RationalVector StableScale::matrix(std::size_t goods_count) const {
  RationalVector m(lambda.size() * goods_count, Rational(1));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (std::size_t k : goods) m[i * goods_count + k] = lambda[i];
  }
  return m;
}

Prop1Result prop1_rationalize(const PanelDataset& panel, const AggregatorGrid& grid) {
  const std::size_t n = panel.consumers(), t_count = panel.observations(), k_count = panel.goods();
  if (k_count < 2) throw PreconditionError("at least two goods are required");
  if (grid.observations() != t_count || grid.goods() != k_count) {
    throw ConfigError("aggregator grid does not match the panel");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t k = 0; k < 2; ++k) {
        if (!panel.expenditure(i, t)[k].is_positive()) {
          throw PreconditionError("expenditure on good " + ix(k) + " must be positive (consumer " +
                                  ix(i) + ", observation " + ix(t) + ")",
                                  i);
        }
      }
    }
  }

  auto pbar_of = [&](std::size_t t, std::size_t k) -> const Rational& { return panel.pbar(t)[k]; };

  if (n == 1) {
    // With a single consumer consistency pins every price to the benchmark.
    RationalVector p;
    ConstructionParams params;
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t k = 0; k < k_count; ++k) {
        Rational v = k < 2 ? aggregators::solve_residual(grid.at(t, k), pbar_of(t, k), {}, 0)
                           : pbar_of(t, k);
        params.bound_log.push_back(entry("single consumer price at observation " + ix(t) +
                                             ", good " + ix(k) + " equals the benchmark",
                                         v, Relation::equal, pbar_of(t, k)));
        p.push_back(std::move(v));
      }
    }
    HeterogeneousPrices prices(1, t_count, k_count, std::move(p));
    auto pooled = revpref::check_garp(revpref::pooled_observations(panel, prices));
    if (!pooled.satisfied) {
      throw PreconditionError(
          "a single consumer must satisfy GARP at the benchmark prices; no other prices are consistent",
          0, pooled.witness);
    }
    return Prop1Result{std::move(prices), std::move(params), std::move(pooled), 1};
  }

  bool case1 = true, case2 = true;
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t k = 0; k < 2; ++k) {
      case1 = case1 && grid.at(t, k).satisfies(Regularity::diverges_at_infinity);
      case2 = case2 && grid.at(t, k).satisfies(Regularity::vanishes_at_zero);
    }
  }
  if (!case1 && !case2) {
    throw PreconditionError("the aggregators for goods 1 and 2 share no regularity case");
  }
  const int reg_case = case1 ? 1 : 2;
  const std::size_t last = n - 1;

  auto e = [&](std::size_t i, std::size_t t, std::size_t k) -> const Rational& {
    return panel.expenditure(i, t)[k];
  };
  // Bounds that depend only on the data.
  Rational min_e1_lead, max_m_lead;
  bool first = true;
  for (std::size_t i = 0; i < last; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      if (first || e(i, t, 0) < min_e1_lead) min_e1_lead = e(i, t, 0);
      if (first || panel.total(i, t) > max_m_lead) max_m_lead = panel.total(i, t);
      first = false;
    }
  }
  const Rational bound_a = min_e1_lead / max_m_lead;
  Rational min_e2_last = e(last, 0, 1), max_m_last = panel.total(last, 0);
  for (std::size_t t = 1; t < t_count; ++t) {
    min_e2_last = std::min(min_e2_last, e(last, t, 1));
    max_m_last = std::max(max_m_last, panel.total(last, t));
  }
  const Rational bound_b = min_e2_last / max_m_last;
  std::optional<Rational> bound_c;
  if (reg_case == 2) {
    for (std::size_t i = 0; i < last; ++i) {
      for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t s = 0; s < t_count; ++s) {
          Rational v = pbar_of(t, 0) * e(last, s, 0) / (pbar_of(s, 0) * panel.total(i, t));
          if (!bound_c || v < *bound_c) bound_c = v;
        }
      }
    }
  }
  Rational p2_cap;
  if (reg_case == 1) {
    first = true;
    for (std::size_t i = 0; i < last; ++i) {
      for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t s = 0; s < t_count; ++s) {
          Rational v = pbar_of(t, 1) * e(last, s, 1) / panel.total(i, t);
          if (first || v < p2_cap) p2_cap = v;
          first = false;
        }
      }
    }
  }
  Rational eps_bound = std::min({bound_a, bound_b, Rational(1)});
  if (bound_c) eps_bound = std::min(eps_bound, *bound_c);
  const Rational eps0 = dyadic_below(eps_bound);

  RationalVector pbar0, pbar1;
  for (std::size_t t = 0; t < t_count; ++t) {
    pbar0.push_back(pbar_of(t, 0));
    pbar1.push_back(pbar_of(t, 1));
  }

  for (int retry = 0; retry <= kMaxRetries; ++retry) {
    const Rational eps = eps0 * Rational::pow2(-retry);
    ConstructionParams params;
    params.epsilon = eps;
    params.retries = retry;
    auto& log = params.bound_log;
    log.push_back(entry("epsilon < min_{j<N,s} e^{j,s}_1 / max_{i<N,t} m^{i,t}", eps, Relation::less, bound_a));
    log.push_back(entry("epsilon < min_s e^{N,s}_2 / max_t m^{N,t}", eps, Relation::less, bound_b));
    log.push_back(entry("epsilon < 1", eps, Relation::less, Rational(1)));

    Rational p1, p2;
    if (reg_case == 1) {
      p1 = min_of(pbar0);
      p2 = std::min(min_of(pbar1), p2_cap / 2);
      log.push_back(entry("p1 <= min_t pbar^t_1", p1, Relation::less_equal, min_of(pbar0)));
      log.push_back(entry("p2 <= min_t pbar^t_2", p2, Relation::less_equal, min_of(pbar1)));
      log.push_back(entry("p2 < min_{i<N,t,s} pbar^t_2 e^{N,s}_2 / m^{i,t}", p2, Relation::less, p2_cap));
    } else {
      log.push_back(entry("epsilon < min_{i<N,t,s} pbar^t_1 e^{N,s}_1 / (pbar^s_1 m^{i,t})", eps,
                          Relation::less, *bound_c));
      p1 = max_of(pbar0) / Rational::pow(eps, static_cast<unsigned>(last * t_count));
      p2 = max_of(pbar1) / Rational::pow(eps, static_cast<unsigned>(t_count));
      log.push_back(entry("p1 epsilon^{(N-1)T} >= max_t pbar^t_1",
                          p1 * Rational::pow(eps, static_cast<unsigned>(last * t_count)),
                          Relation::greater_equal, max_of(pbar0)));
      log.push_back(entry("p2 epsilon^T >= max_t pbar^t_2",
                          p2 * Rational::pow(eps, static_cast<unsigned>(t_count)),
                          Relation::greater_equal, max_of(pbar1)));
    }
    params.p1_seed = p1;
    params.p2_seed = p2;

    RationalVector p(n * t_count * k_count);
    auto at = [&](std::size_t i, std::size_t t, std::size_t k) -> Rational& {
      return p[(i * t_count + t) * k_count + k];
    };
    try {
      for (std::size_t t = 0; t < t_count; ++t) {
        RationalVector lead;
        for (std::size_t i = 0; i < last; ++i) {
          at(i, t, 0) = p1 * Rational::pow(eps, static_cast<unsigned>(i * t_count + t));
          lead.push_back(at(i, t, 0));
        }
        at(last, t, 0) = aggregators::solve_residual(grid.at(t, 0), pbar_of(t, 0), lead, last);
        at(last, t, 1) = Rational::pow(eps, static_cast<unsigned>(t + 1)) * p2;
        Rational common =
            aggregators::solve_common(grid.at(t, 1), pbar_of(t, 1), at(last, t, 1), last, n);
        for (std::size_t i = 0; i < last; ++i) at(i, t, 1) = common;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 2; k < k_count; ++k) at(i, t, k) = pbar_of(t, k);
        }
        if (reg_case == 1) {
          log.push_back(entry("p^{N," + ix(t) + "}_1 >= pbar^" + ix(t) + "_1", at(last, t, 0),
                              Relation::greater_equal, pbar_of(t, 0)));
          log.push_back(entry("common p^{i," + ix(t) + "}_2 >= pbar^" + ix(t) + "_2", common,
                              Relation::greater_equal, pbar_of(t, 1)));
        } else {
          log.push_back(entry("p^{N," + ix(t) + "}_1 <= pbar^" + ix(t) + "_1", at(last, t, 0),
                              Relation::less_equal, pbar_of(t, 0)));
          log.push_back(entry("common p^{i," + ix(t) + "}_2 <= pbar^" + ix(t) + "_2", common,
                              Relation::less_equal, pbar_of(t, 1)));
        }
      }
    } catch (const NoBracket&) {
      continue;
    }

    HeterogeneousPrices prices(n, t_count, k_count, std::move(p));
    auto pooled = revpref::check_garp(revpref::pooled_observations(panel, prices));
    log.push_back(entry("min over lexicographically later (j,s) of p^{i,t}.x^{j,s} - m^{i,t}",
                        forward_margin(pooled.values), Relation::greater, Rational(0)));
    if (pooled.satisfied && params.all_bounds_hold()) {
      return Prop1Result{std::move(prices), std::move(params), std::move(pooled), reg_case};
    }
  }
  throw ConstructionFailed("no epsilon within 2^-60 of the data bound produced pooled GARP");
}

Prop2Result prop2_disaggregate(const AggregateDemandData& data) {
  const std::size_t n = data.consumers(), t_count = data.observations(), k_count = data.goods();
  RationalVector pbar;
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (!data.aggregate(t)[k].is_positive()) {
        throw PreconditionError("aggregate demand for good " + ix(k) + " at observation " + ix(t) + " is zero");
      }
      Rational mass = 0;
      for (std::size_t i = 0; i < n; ++i) mass += data.expenditure(i, t)[k];
      if (!mass.is_positive()) {
        throw PreconditionError("aggregate expenditure on good " + ix(k) + " at observation " + ix(t) +
                                " is zero while aggregate demand is positive");
      }
      pbar.push_back(mass / data.aggregate(t)[k]);
    }
  }
  PanelDataset panel(n, t_count, k_count, data.raw_expenditures(), pbar);
  Prop1Result r = prop1_rationalize(panel, AggregatorGrid::expenditure_weighted_harmonic(panel));

  std::vector<Bundle> demands;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      demands.push_back(implied_bundle(panel.expenditure(i, t), r.prices.at(i, t)));
    }
  }
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t k = 0; k < k_count; ++k) {
      Rational total = 0;
      for (std::size_t i = 0; i < n; ++i) total += demands[i * t_count + t][k];
      r.params.bound_log.push_back(entry("sum_i x^{i," + ix(t) + "}_" + ix(k) + " = xbar", total,
                                         Relation::equal, data.aggregate(t)[k]));
      if (total != data.aggregate(t)[k]) {
        throw ConstructionFailed("disaggregated demand does not add up at observation " + ix(t));
      }
    }
  }
  return Prop2Result{std::move(pbar), std::move(demands), std::move(r.prices), std::move(r.params),
                     std::move(r.pooled)};
}

std::vector<InvarianceReport> check_stable_invariance(const PanelDataset& panel,
                                                      std::span<const Rational> scales) {
  const std::size_t k_count = panel.goods();
  if (scales.size() != panel.consumers() * k_count) throw DomainError("scales must be N x K");
  std::vector<InvarianceReport> out;
  for (std::size_t i = 0; i < panel.consumers(); ++i) {
    std::vector<revpref::Observation> scaled;
    for (std::size_t t = 0; t < panel.observations(); ++t) {
      RationalVector p;
      for (std::size_t k = 0; k < k_count; ++k) p.push_back(scales[i * k_count + k] * panel.pbar(t)[k]);
      scaled.push_back({implied_bundle(panel.expenditure(i, t), p), p});
    }
    auto bench = revpref::observations_at_pbar(panel, i);
    auto g_scaled = revpref::direct_relations(scaled);
    auto g_bench = revpref::direct_relations(bench);
    InvarianceReport r;
    r.consumer = i;
    r.scaled = revpref::check_acyclic(g_scaled);
    r.benchmark = revpref::check_acyclic(g_bench);
    r.graphs_identical = g_scaled == g_bench;
    if (r.scaled.satisfied != r.benchmark.satisfied) {
      throw std::logic_error("stable rescaling changed the GARP verdict of consumer " + ix(i));
    }
    out.push_back(std::move(r));
  }
  return out;
}

Prop4Result prop4_stable_prices(const PanelDataset& panel, std::vector<std::size_t> goods,
                                const AggregatorSpec& w) {
  const std::size_t n = panel.consumers(), t_count = panel.observations(), k_count = panel.goods();
  std::sort(goods.begin(), goods.end());
  goods.erase(std::unique(goods.begin(), goods.end()), goods.end());
  if (goods.empty()) throw ConfigError("the scale set must name at least one good");
  if (goods.back() >= k_count) throw ConfigError("scale set names a good beyond K");
  if (!w.homogeneous_degree_one()) throw ConfigError("stable scales need a linearly homogeneous aggregator");
  require_garp_per_consumer(panel);
  auto spend_on = [&](std::size_t i, std::size_t t, std::size_t s) {
    Rational v = 0;
    for (std::size_t k : goods) v += panel.pbar(s)[k] * panel.expenditure(i, t)[k] / panel.pbar(t)[k];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      if (!spend_on(i, t, t).is_positive()) {
        throw PreconditionError("consumer " + ix(i) + " spends nothing on the scaled goods at observation " + ix(t), i);
      }
    }
  }

  Rational bound = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      for (std::size_t s = 0; s < t_count; ++s) {
        for (std::size_t t = 0; t < t_count; ++t) {
          bound = std::min(bound, spend_on(i, t, s) / panel.total(j, s));
        }
      }
    }
  }
  const Rational eps0 = dyadic_below(bound);

  for (int retry = 0; retry <= kMaxRetries; ++retry) {
    const Rational eps = eps0 * Rational::pow2(-retry);
    ConstructionParams params;
    params.epsilon = eps;
    params.retries = retry;
    params.bound_log.push_back(entry(
        "epsilon < min_{i>j,s,t} (sum_{k in R} pbar^s_k e^{i,t}_k / pbar^t_k) / m^{j,s}, capped below 1",
        eps, Relation::less, bound));

    RationalVector raw;
    for (std::size_t i = 0; i < n; ++i) raw.push_back(Rational::pow(eps, static_cast<unsigned>(i + 1)));
    Rational beta = aggregators::eval(w, raw).inverse();
    StableScale scale{{}, goods};
    for (const auto& r : raw) scale.lambda.push_back(beta * r);
    Rational agg = aggregators::eval(w, scale.lambda);
    if (w.kind() == aggregators::Kind::custom) {
      params.bound_log.push_back(entry("|W(lambda) - 1| <= 2^-60", (agg - Rational(1)).abs(),
                                       Relation::less_equal, aggregators::solver_tolerance()));
    } else {
      params.bound_log.push_back(entry("W(lambda) = 1", agg, Relation::equal, Rational(1)));
    }

    HeterogeneousPrices prices = HeterogeneousPrices::stable(panel, scale.matrix(k_count));
    auto pooled = revpref::check_garp(revpref::pooled_observations(panel, prices));
    Rational margin;
    bool have_margin = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        for (std::size_t s = 0; s < t_count; ++s) {
          for (std::size_t t = 0; t < t_count; ++t) {
            std::size_t a = j * t_count + s, b = i * t_count + t;
            Rational d = pooled.values[a][b] - pooled.values[a][a];
            if (!have_margin || d < margin) margin = d;
            have_margin = true;
          }
        }
      }
    }
    bool cross_ok = !have_margin || margin.is_positive();
    if (have_margin) {
      params.bound_log.push_back(entry("min_{i>j,s,t} p^{j,s}.x^{i,t} - m^{j,s}", margin,
                                       Relation::greater, Rational(0)));
    }
    if (pooled.satisfied && cross_ok && params.all_bounds_hold()) {
      return Prop4Result{std::move(scale), std::move(prices), std::move(params), std::move(pooled),
                         std::move(agg), cross_ok};
    }
  }
  throw ConstructionFailed("no epsilon within 2^-60 of the data bound produced pooled GARP");
}

ScaleTransformReport scale_transform_verify(const PanelDataset& panel, const StableScale& scale,
                                            const revpref::AfriatSolution& base, std::uint64_t seed,
                                            std::size_t random_points) {
  const std::size_t n = panel.consumers(), t_count = panel.observations(), k_count = panel.goods();
  if (scale.lambda.size() != n) throw DomainError("one scale per consumer is required");
  HeterogeneousPrices prices = HeterogeneousPrices::stable(panel, scale.matrix(k_count));
  auto pooled = revpref::pooled_observations(panel, prices);
  if (base.levels.size() != pooled.size()) throw DomainError("Afriat solution does not match the pooled data");

  RationalVector own;
  for (const auto& o : pooled) own.push_back(dot(o.p, o.x.values()));
  auto utility = [&](std::span<const Rational> x) {
    Rational best;
    for (std::size_t a = 0; a < pooled.size(); ++a) {
      Rational v = base.levels[a] + base.multipliers[a] * (dot(pooled[a].p, x) - own[a]);
      if (a == 0 || v < best) best = std::move(v);
    }
    return best;
  };

  std::vector<bool> scaled_good(k_count, false);
  for (std::size_t k : scale.goods) scaled_good[k] = true;
  std::mt19937_64 rng(seed);
  ScaleTransformReport report;
  for (std::size_t i = 0; i < n; ++i) {
    const Rational inv = scale.lambda[i].inverse();
    auto transform = [&](const RationalVector& x) {
      RationalVector y = x;
      for (std::size_t k = 0; k < k_count; ++k) {
        if (scaled_good[k]) y[k] *= inv;
      }
      return y;
    };
    for (std::size_t t = 0; t < t_count; ++t) {
      auto pbar = panel.pbar(t);
      const Rational& m = panel.total(i, t);
      const Rational u_obs = utility(pooled[i * t_count + t].x.values());

      std::vector<RationalVector> vertices{RationalVector(k_count, Rational(0))};
      for (std::size_t k = 0; k < k_count; ++k) {
        RationalVector v(k_count, Rational(0));
        v[k] = m / pbar[k];
        vertices.push_back(std::move(v));
      }
      std::vector<RationalVector> samples = vertices;
      for (std::size_t a = 0; a < vertices.size(); ++a) {
        for (std::size_t b = a + 1; b < vertices.size(); ++b) {
          RationalVector mid(k_count);
          for (std::size_t k = 0; k < k_count; ++k) mid[k] = (vertices[a][k] + vertices[b][k]) / 2;
          samples.push_back(std::move(mid));
        }
      }
      for (std::size_t r = 0; r < random_points; ++r) {
        std::vector<long> wts(vertices.size());
        long total = 0;
        for (auto& v : wts) {
          v = static_cast<long>(rng() % 65536);
          total += v;
        }
        if (total == 0) {
          wts[0] = 1;
          total = 1;
        }
        RationalVector x(k_count, Rational(0));
        for (std::size_t a = 1; a < vertices.size(); ++a) {
          x[a - 1] = Rational(wts[a], total) * vertices[a][a - 1];
        }
        samples.push_back(std::move(x));
      }
      auto xb = panel.bundle_at_pbar(i, t);
      samples.emplace_back(xb.values().begin(), xb.values().end());

      for (const auto& x : samples) {
        ++report.points_checked;
        if (utility(transform(x)) > u_obs) {
          report.ok = false;
          report.failure = "transformed utility exceeds the observed choice for consumer " + ix(i) +
                           " at observation " + ix(t);
          return report;
        }
      }
    }
  }
  return report;
}

std::vector<revpref::PricedBundle> linear_priced_bundles(const PanelDataset& panel, std::size_t i) {
  std::vector<revpref::PricedBundle> out;
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    auto p = panel.pbar(t);
    out.push_back({panel.bundle_at_pbar(i, t), revpref::PriceSystem::linear(RationalVector(p.begin(), p.end()))});
  }
  return out;
}

Prop6Result prop6_au_lambdas(const PanelDataset& panel, const behavioral::BehavioralExpenditure& phi,
                             const AggregatorSpec& w) {
  const std::size_t n = panel.consumers(), t_count = panel.observations();
  if (!w.homogeneous_degree_one()) throw ConfigError("scale normalization needs a linearly homogeneous aggregator");
  behavioral::check_monotone_along_rays(phi, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = revpref::check_gapp(linear_priced_bundles(panel, i));
    if (!v.satisfied) {
      throw PreconditionError("consumer " + ix(i) + " violates GAPP at the benchmark prices", i, v.witness);
    }
  }
  const bool case_one = phi.regularity_case() == behavioral::RegularityCase::one;

  // cost[s][i * T + t] = pbar^s . x^{i,t}
  std::vector<RationalVector> cost(t_count, RationalVector(n * t_count));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      Bundle x = panel.bundle_at_pbar(i, t);
      for (std::size_t s = 0; s < t_count; ++s) cost[s][i * t_count + t] = dot(panel.pbar(s), x.values());
    }
  }

  // Cross-consumer requirement for i < j: phi(a, lambda_j a) > phi(m^{i,t}, lambda_i m^{i,t})
  // for every a = pbar^s.x^{i,t}.
  auto build = [&](const Rational& anchor, ConstructionParams& params) {
    RationalVector lam{anchor};
    for (std::size_t j = 1; j < n; ++j) {
      RationalVector a_vals;
      Rational v_max;
      Rational i_lo, i_hi;
      bool first = true;
      for (std::size_t i = 0; i < j; ++i) {
        for (std::size_t t = 0; t < t_count; ++t) {
          const Rational& m = cost[t][i * t_count + t];
          Rational y = lam[i] * m;
          Rational v = behavioral::eval_phi(phi, m, y);
          if (first || v > v_max) v_max = v;
          for (const Rational* c : std::initializer_list<const Rational*>{&m, &y}) {
            if (first || *c < i_lo) i_lo = *c;
            if (first || *c > i_hi) i_hi = *c;
            first = false;
          }
          for (std::size_t s = 0; s < t_count; ++s) {
            const Rational& a = cost[s][i * t_count + t];
            a_vals.push_back(a);
            i_lo = std::min(i_lo, a);
            i_hi = std::max(i_hi, a);
          }
        }
      }
      auto dominates = [&](const Rational& x) {
        for (const auto& a : a_vals) {
          if (behavioral::eval_phi(phi, a, x) <= v_max) return false;
        }
        return true;
      };
      std::optional<Rational> threshold;
      Rational x = case_one ? i_hi : i_lo;
      for (int step = 0; step <= kThresholdSteps && !threshold; ++step) {
        if (case_one ? (dominates(x) && dominates(x * 2) && dominates(x * 4))
                     : (dominates(x) && dominates(x / 2) && dominates(x / 4))) {
          threshold = x;
        } else {
          x = case_one ? x * 2 : x / 2;
        }
      }
      if (!threshold) {
        throw RegularityError("no threshold for consumer " + ix(j) + " within 2^" +
                              std::to_string(kThresholdSteps) + " of the data interval");
      }
      Rational lam_j = case_one ? *threshold / min_of(a_vals) : *threshold / max_of(a_vals);
      params.bound_log.push_back(entry(std::string(case_one ? "M_" : "m_") + ix(j) +
                                           " threshold inside the data interval scaled by 2^k",
                                       *threshold, case_one ? Relation::greater_equal : Relation::less_equal,
                                       case_one ? i_hi : i_lo));
      int adjust = 0;
      auto satisfied = [&](const Rational& l) {
        for (const auto& a : a_vals) {
          if (behavioral::eval_phi(phi, a, l * a) <= v_max) return false;
        }
        return true;
      };
      while (!satisfied(lam_j)) {
        if (++adjust > kScaleAdjustSteps) {
          throw RegularityError("scale for consumer " + ix(j) + " not found within 2^10 of the threshold");
        }
        lam_j = case_one ? lam_j * 2 : lam_j / 2;
      }
      lam.push_back(std::move(lam_j));
    }
    return lam;
  };

  Rational anchor = 1;
  for (int round = 0; round < kNormalizationRounds; ++round) {
    ConstructionParams params;
    params.retries = round;
    RationalVector raw = build(anchor, params);
    Rational alpha1 = aggregators::eval(w, raw).inverse();
    StableScale scale{{}, {}};
    for (std::size_t k = 0; k < panel.goods(); ++k) scale.goods.push_back(k);
    for (const auto& r : raw) scale.lambda.push_back(alpha1 * r);
    params.alpha.push_back(alpha1);
    for (std::size_t j = 1; j < raw.size(); ++j) params.alpha.push_back(raw[j] / raw[j - 1]);
    Rational agg = aggregators::eval(w, scale.lambda);
    if (w.kind() == aggregators::Kind::custom) {
      params.bound_log.push_back(entry("|W(lambda) - 1| <= 2^-60", (agg - Rational(1)).abs(),
                                       Relation::less_equal, aggregators::solver_tolerance()));
    } else {
      params.bound_log.push_back(entry("W(lambda) = 1", agg, Relation::equal, Rational(1)));
    }

    auto systems = behavioral::make_price_systems(panel, scale.lambda, phi);
    std::vector<revpref::PricedBundle> data;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < t_count; ++t) data.push_back({panel.bundle_at_pbar(i, t), systems[i * t_count + t]});
    }
    auto graph = revpref::price_preference_relations(data);
    auto pooled = revpref::check_acyclic(graph);
    bool cross_ok = true;
    for (std::size_t j = 0; j < n && cross_ok; ++j) {
      for (std::size_t i = 0; i < j && cross_ok; ++i) {
        for (std::size_t s = 0; s < t_count && cross_ok; ++s) {
          for (std::size_t t = 0; t < t_count; ++t) {
            if (graph.weak(j * t_count + s, i * t_count + t)) {
              cross_ok = false;
              break;
            }
          }
        }
      }
    }
    if (pooled.satisfied && cross_ok && params.all_bounds_hold()) {
      return Prop6Result{std::move(scale), std::move(systems), std::move(params), std::move(pooled), cross_ok};
    }
    anchor = scale.lambda[0];
  }
  // Seen when phi is bounded on the side the case needs and W caps how far
  // lambda_1 can absorb the normalization, e.g. max(e, e') with arithmetic W.
  throw RegularityError("scales normalized to W(lambda) = 1 cannot separate consumers under phi '" + phi.key() +
                        "' with this aggregator");
}

}  // namespace hetprice::constructions
