#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetprice/aggregators.hpp"
#include "hetprice/behavioral.hpp"
#include "hetprice/dataset.hpp"
#include "hetprice/revpref.hpp"

// Constructive rationalizations with heterogeneous prices. Every construction
// re-audits its own output and never returns an unaudited result.
namespace hetprice::constructions {

enum class Relation { less, less_equal, equal, greater_equal, greater };

// One inequality used to choose a construction parameter, kept so the choice
// can be re-checked later.
struct BoundEntry {
  std::string description;
  Rational lhs;
  Relation relation;
  Rational rhs;
  bool holds() const;
};

struct ConstructionParams {
  std::optional<Rational> epsilon;
  std::optional<Rational> p1_seed;
  std::optional<Rational> p2_seed;
  RationalVector alpha;
  std::vector<BoundEntry> bound_log;
  int retries = 0;
  bool all_bounds_hold() const;
};

// W^t_k for every observation t and good k.
class AggregatorGrid {
 public:
  AggregatorGrid(std::size_t observations, std::size_t goods,
                 std::vector<aggregators::AggregatorSpec> specs);
  static AggregatorGrid uniform(const aggregators::AggregatorSpec& w, std::size_t observations,
                                std::size_t goods);
  // Weighted harmonic W^t_k with weights e^{i,t}_k, i = 1..N.
  static AggregatorGrid expenditure_weighted_harmonic(const PanelDataset& panel);

  const aggregators::AggregatorSpec& at(std::size_t t, std::size_t k) const {
    return specs_[t * k_ + k];
  }
  std::size_t observations() const { return t_; }
  std::size_t goods() const { return k_; }

 private:
  std::size_t t_, k_;
  std::vector<aggregators::AggregatorSpec> specs_;
};

// Stable scales lambda_i applied to the goods in `goods`.
struct StableScale {
  RationalVector lambda;
  std::vector<std::size_t> goods;
  // beta_i = 1 / lambda_i
  RationalVector beta() const;
  // lambda_{i,k}: lambda_i on the scaled goods, one elsewhere.
  RationalVector matrix(std::size_t goods_count) const;
};

struct Prop1Result {
  HeterogeneousPrices prices;
  ConstructionParams params;
  revpref::GarpVerdict pooled;
  int regularity_case = 1;
};

// Prices consistent with pbar under W that make the pooled data satisfy
// GARP. Needs positive spending on goods 1 and 2 everywhere and all W^t_1,
// W^t_2 sharing one regularity case.
Prop1Result prop1_rationalize(const PanelDataset& panel, const AggregatorGrid& grid);

struct Prop2Result {
  RationalVector pbar;                  // [t][k], pbar = M / xbar
  std::vector<Bundle> demands;          // i * T + t
  HeterogeneousPrices prices;
  ConstructionParams params;
  revpref::GarpVerdict pooled;
};

// Individual demands summing exactly to xbar, rationalized by a single
// preference at expenditure-weighted harmonic consistent prices.
Prop2Result prop2_disaggregate(const AggregateDemandData& data);

struct InvarianceReport {
  std::size_t consumer = 0;
  revpref::GarpVerdict scaled;
  revpref::GarpVerdict benchmark;
  bool graphs_identical = false;
};

// For p^{i,t} = lambda_{i,k} pbar^t_k, compares each consumer's revealed
// preference graph at p against the graph at pbar. scales laid out [i][k].
std::vector<InvarianceReport> check_stable_invariance(const PanelDataset& panel,
                                                      std::span<const Rational> scales);

struct Prop4Result {
  StableScale scale;
  HeterogeneousPrices prices;
  ConstructionParams params;
  revpref::GarpVerdict pooled;
  Rational aggregate_scale;  // W(lambda)
  bool cross_edges_eliminated = false;
};

// Stable scales on goods R with W(lambda) = 1 under which the pooled data
// satisfy GARP. Every consumer must satisfy GARP at pbar and spend a positive
// amount on R at every observation.
Prop4Result prop4_stable_prices(const PanelDataset& panel, std::vector<std::size_t> goods,
                                const aggregators::AggregatorSpec& w);

struct ScaleTransformReport {
  bool ok = true;
  std::size_t points_checked = 0;
  std::optional<std::string> failure;
};

// Checks that the budget-scale transform of the pooled utility rationalizes
// each consumer at pbar: for every (i, t) and sampled x in B(pbar^t, m^{i,t}),
// U((x_R / lambda_i, x_-R)) <= U(x(e^{i,t}, p^{i,t})).
ScaleTransformReport scale_transform_verify(const PanelDataset& panel, const StableScale& scale,
                                            const revpref::AfriatSolution& base,
                                            std::uint64_t seed, std::size_t random_points = 100);

struct Prop6Result {
  StableScale scale;
  std::vector<revpref::PriceSystem> systems;  // i * T + t
  ConstructionParams params;
  revpref::GarpVerdict pooled_gapp;
  bool cross_edges_eliminated = false;
};

// Scales lambda with W(lambda) = 1 such that f^{i,t}(x) =
// phi(pbar^t.x, lambda_i pbar^t.x) makes the pooled data satisfy GAPP.
// Every consumer must satisfy GAPP with linear systems at pbar.
Prop6Result prop6_au_lambdas(const PanelDataset& panel, const behavioral::BehavioralExpenditure& phi,
                             const aggregators::AggregatorSpec& w);

// Linear systems pbar^t for consumer i.
std::vector<revpref::PricedBundle> linear_priced_bundles(const PanelDataset& panel, std::size_t i);

}  // namespace hetprice::constructions
