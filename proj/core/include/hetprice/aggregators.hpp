#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetprice/rational.hpp"

// Aggregators W : R^N_{++} -> R_{++} that pin a benchmark price to the
// consumer-specific prices: W(p^{1,t}_k, ..., p^{N,t}_k) = pbar^t_k.
namespace hetprice::aggregators {

enum class Regularity {
  diverges_at_infinity,  // W -> infinity as any single coordinate does
  vanishes_at_zero,      // W -> 0 as any single coordinate does
};

enum class Kind { arithmetic, weighted_arithmetic, weighted_harmonic, custom };

using CustomFn = std::function<Rational(std::span<const Rational>)>;

class AggregatorSpec {
 public:
  static AggregatorSpec arithmetic();
  // sum_i w_i p_i with positive weights summing to one.
  static AggregatorSpec weighted_arithmetic(RationalVector weights);
  // M / sum_i (e_i / p_i). Weights must be nonnegative with sum M > 0.
  static AggregatorSpec weighted_harmonic(RationalVector weights);
  static AggregatorSpec harmonic_mean(std::size_t n);
  // Custom kinds must declare at least one regularity case they satisfy.
  static AggregatorSpec custom(std::string name, CustomFn fn, std::vector<Regularity> declared,
                               bool homogeneous_degree_one);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool satisfies(Regularity r) const;
  bool homogeneous_degree_one() const { return homogeneous_; }
  const RationalVector& weights() const { return weights_; }
  const CustomFn& custom_fn() const { return fn_; }

 private:
  Kind kind_ = Kind::arithmetic;
  std::string name_ = "arithmetic";
  RationalVector weights_;
  CustomFn fn_;
  bool diverges_ = true;
  bool vanishes_ = false;
  bool homogeneous_ = true;
};

Rational eval(const AggregatorSpec& w, std::span<const Rational> prices);

// Solves W(filled) = target for the coordinate at free_index, where filled
// is fixed with the free value inserted at free_index. Exact for the
// arithmetic and harmonic kinds; bisection for custom kinds, accurate to
// 2^-60 relative. Throws NoBracket when no positive solution exists.
Rational solve_residual(const AggregatorSpec& w, const Rational& target,
                        std::span<const Rational> fixed, std::size_t free_index);

// Solves W(q, ..., q, pinned) = target for a common value q on every
// coordinate except pinned_index.
Rational solve_common(const AggregatorSpec& w, const Rational& target, const Rational& pinned,
                      std::size_t pinned_index, std::size_t arity);

// Relative accuracy of the bisection solver.
Rational solver_tolerance();

// Geometric mean, evaluated to 2^-96 relative accuracy. Satisfies both
// regularity cases and is homogeneous of degree one.
AggregatorSpec geometric_mean();

// Sampled sanity check for custom kinds: W(q,...,q) = q within tolerance and
// strict increase in every coordinate. Throws ConfigError on failure.
void validate_custom(const AggregatorSpec& w, std::size_t arity, std::uint64_t seed);

// Plugin lookup for names other than "arithmetic" and "harmonic".
using PluginFactory = std::function<AggregatorSpec()>;
void register_plugin(const std::string& name, PluginFactory factory);
// "arithmetic", "harmonic" (equal weights over `arity` coordinates),
// "geometric", or a registered plugin name.
AggregatorSpec from_name(std::string_view name, std::size_t arity);

}  // namespace hetprice::aggregators
