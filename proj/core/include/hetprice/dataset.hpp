#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hetprice/rational.hpp"

namespace hetprice {

// Nonnegative quantity vector.
class Bundle {
 public:
  Bundle() = default;
  explicit Bundle(RationalVector quantities);

  std::size_t size() const { return q_.size(); }
  const Rational& operator[](std::size_t k) const { return q_[k]; }
  std::span<const Rational> values() const { return q_; }

  friend bool operator==(const Bundle&, const Bundle&) = default;

 private:
  RationalVector q_;
};

// x(e, p): quantities bought when spending e_k at price p_k.
Bundle implied_bundle(std::span<const Rational> expenditure, std::span<const Rational> prices);

// Expenditures e^{i,t} of N consumers over T observations on K goods, plus the
// homogeneous-price benchmark pbar^t. Indices are zero-based.
class PanelDataset {
 public:
  // expenditures is laid out as [i][t][k], pbar as [t][k].
  PanelDataset(std::size_t consumers, std::size_t observations, std::size_t goods,
               RationalVector expenditures, RationalVector pbar);

  std::size_t consumers() const { return n_; }
  std::size_t observations() const { return t_; }
  std::size_t goods() const { return k_; }

  std::span<const Rational> expenditure(std::size_t i, std::size_t t) const;
  std::span<const Rational> pbar(std::size_t t) const;
  // m^{i,t}
  const Rational& total(std::size_t i, std::size_t t) const { return totals_[i * t_ + t]; }
  // x(e^{i,t}, pbar^t)
  Bundle bundle_at_pbar(std::size_t i, std::size_t t) const;

  // The single-consumer panel of consumer i.
  PanelDataset consumer_panel(std::size_t i) const;

  const RationalVector& raw_expenditures() const { return e_; }
  const RationalVector& raw_pbar() const { return pbar_; }

  friend bool operator==(const PanelDataset& a, const PanelDataset& b) {
    return a.n_ == b.n_ && a.t_ == b.t_ && a.k_ == b.k_ && a.e_ == b.e_ && a.pbar_ == b.pbar_;
  }

 private:
  std::size_t n_, t_, k_;
  RationalVector e_;
  RationalVector pbar_;
  RationalVector totals_;
};

// Consumer-and-observation specific prices p^{i,t}. When stable scales are
// recorded, p^{i,t}_k = lambda_{i,k} * pbar^t_k must hold for every t.
class HeterogeneousPrices {
 public:
  // prices laid out as [i][t][k]; stable_scales as [i][k].
  HeterogeneousPrices(std::size_t consumers, std::size_t observations, std::size_t goods,
                      RationalVector prices,
                      std::optional<RationalVector> stable_scales = std::nullopt);

  // Builds p^{i,t} = lambda_{i,k} pbar^t_k.
  static HeterogeneousPrices stable(const PanelDataset& panel, RationalVector scales);

  std::size_t consumers() const { return n_; }
  std::size_t observations() const { return t_; }
  std::size_t goods() const { return k_; }
  std::span<const Rational> at(std::size_t i, std::size_t t) const;
  const std::optional<RationalVector>& stable_scales() const { return scales_; }

  // Throws DomainError when shape differs or a recorded stable scale does not
  // reproduce the prices.
  void check_against(const PanelDataset& panel) const;

  friend bool operator==(const HeterogeneousPrices&, const HeterogeneousPrices&) = default;

 private:
  std::size_t n_, t_, k_;
  RationalVector p_;
  std::optional<RationalVector> scales_;
};

// Aggregate demand xbar^t and individual expenditures, the input of the
// disaggregation construction.
class AggregateDemandData {
 public:
  // expenditures laid out as [i][t][k]; aggregate as [t][k].
  AggregateDemandData(std::size_t consumers, std::size_t observations, std::size_t goods,
                      RationalVector expenditures, RationalVector aggregate);

  std::size_t consumers() const { return n_; }
  std::size_t observations() const { return t_; }
  std::size_t goods() const { return k_; }
  std::span<const Rational> expenditure(std::size_t i, std::size_t t) const;
  std::span<const Rational> aggregate(std::size_t t) const;
  const RationalVector& raw_expenditures() const { return e_; }

 private:
  std::size_t n_, t_, k_;
  RationalVector e_;
  RationalVector xbar_;
};

struct CrossSectionObservation {
  RationalVector pbar;
  Rational total;
  // Expenditure vectors e with sum(e) == total, one per type.
  std::vector<RationalVector> points;
  std::optional<RationalVector> weights;
};

// T repeated cross-sections of N expenditure points each, all on budget
// {x : pbar^t . x = m^t}.
class CrossSection {
 public:
  CrossSection(std::size_t goods, std::vector<CrossSectionObservation> observations);

  std::size_t goods() const { return k_; }
  std::size_t observations() const { return obs_.size(); }
  std::size_t points_per_observation() const { return n_; }
  const CrossSectionObservation& at(std::size_t t) const { return obs_[t]; }
  // x(e, pbar^t) of point j at observation t.
  Bundle bundle(std::size_t t, std::size_t j) const;
  // Weight of point j at observation t; 1/N when weights are absent.
  Rational weight(std::size_t t, std::size_t j) const;
  bool has_weights() const;

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<CrossSectionObservation> obs_;
};

// sigma^t(i): index of the point at observation t assigned to type i.
class SortingFunction {
 public:
  SortingFunction() = default;
  explicit SortingFunction(std::vector<std::vector<std::size_t>> assignment);

  std::size_t observations() const { return a_.size(); }
  std::size_t types() const { return a_.empty() ? 0 : a_[0].size(); }
  std::size_t operator()(std::size_t t, std::size_t i) const { return a_[t][i]; }
  const std::vector<std::vector<std::size_t>>& assignment() const { return a_; }

  friend bool operator==(const SortingFunction&, const SortingFunction&) = default;
  friend auto operator<=>(const SortingFunction&, const SortingFunction&) = default;

 private:
  std::vector<std::vector<std::size_t>> a_;
};

// Panel whose consumer i spends sigma^t(i)'s expenditure at observation t.
PanelDataset sorted_panel(const CrossSection& cs, const SortingFunction& sigma);

}  // namespace hetprice
