#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hetprice/dataset.hpp"

namespace hetprice::revpref {

struct Observation {
  Bundle x;
  RationalVector p;
};

// Observations of consumer i at the benchmark prices, in observation order.
std::vector<Observation> observations_at_pbar(const PanelDataset& panel, std::size_t i);
// Pooled observations (x(e^{i,t}, p^{i,t}), p^{i,t}) indexed i * T + t.
std::vector<Observation> pooled_observations(const PanelDataset& panel,
                                             const HeterogeneousPrices& prices);

using Matrix = std::vector<std::vector<Rational>>;

// Direct weak and strict relations over n nodes plus the matrix they were
// read from. For bundles the matrix is C[t][s] = p^t . x^s; for price
// systems it is F[t][s] = f^t(x^s).
class RevealedPreferenceGraph {
 public:
  RevealedPreferenceGraph(std::vector<std::vector<bool>> weak,
                          std::vector<std::vector<bool>> strict, Matrix values);

  std::size_t size() const { return weak_.size(); }
  bool weak(std::size_t t, std::size_t s) const { return weak_[t][s]; }
  bool strict(std::size_t t, std::size_t s) const { return strict_[t][s]; }
  const Matrix& values() const { return values_; }

  friend bool operator==(const RevealedPreferenceGraph&, const RevealedPreferenceGraph&) = default;

 private:
  std::vector<std::vector<bool>> weak_;
  std::vector<std::vector<bool>> strict_;
  Matrix values_;
};

struct GarpVerdict {
  bool satisfied = true;
  // Closed cycle t_1, ..., t_L, t_1: every step weak, at least one strict.
  std::optional<std::vector<std::size_t>> witness;
  Matrix values;
};

// t weakly directly preferred to s iff p^t.x^t >= p^t.x^s; strict with >.
RevealedPreferenceGraph direct_relations(std::span<const Observation> obs);
GarpVerdict check_garp(std::span<const Observation> obs);
// Cycle search on any pair of direct relations.
GarpVerdict check_acyclic(const RevealedPreferenceGraph& g);
// True when witness is a closed walk along weak edges with a strict step.
bool witness_replays(const RevealedPreferenceGraph& g, std::span<const std::size_t> witness);

struct LinearTag {
  RationalVector p;
};
struct BehavioralTag {
  std::string phi;
  RationalVector pbar;
  RationalVector perceived;
};
using PriceSystemTag = std::variant<LinearTag, BehavioralTag>;

// Expenditure function f mapping bundles to money.
class PriceSystem {
 public:
  using Evaluator = std::function<Rational(const Bundle&)>;
  PriceSystem(Evaluator f, PriceSystemTag tag);
  static PriceSystem linear(RationalVector p);

  Rational operator()(const Bundle& x) const { return f_(x); }
  const PriceSystemTag& tag() const { return tag_; }

 private:
  Evaluator f_;
  PriceSystemTag tag_;
};

struct PricedBundle {
  Bundle x;
  PriceSystem f;
};

// f^t weakly preferred to f^s iff f^t(x^s) <= f^s(x^s); strict with <.
// Each f^t is evaluated once per bundle.
RevealedPreferenceGraph price_preference_relations(std::span<const PricedBundle> data);
GarpVerdict check_gapp(std::span<const PricedBundle> data);

struct AfriatSolution {
  RationalVector levels;
  RationalVector multipliers;
};

// Levels U^t and multipliers > 0 with U^s <= U^t + mult^t p^t.(x^s - x^t).
// Throws GarpViolation with a witness when the data fail GARP.
AfriatSolution afriat_construct(std::span<const Observation> obs);
bool afriat_inequalities_hold(const AfriatSolution& sol, std::span<const Observation> obs);
// min_t U^t + mult^t p^t.(x - x^t)
Rational evaluate_afriat(const AfriatSolution& sol, std::span<const Observation> obs,
                         std::span<const Rational> x);

}  // namespace hetprice::revpref
