#include "hetprice/dataset.hpp"

#include <string>

#include "hetprice/errors.hpp"

namespace hetprice {

namespace {

std::string at_index(std::size_t i, std::size_t t, std::size_t k) {
  return " (consumer " + std::to_string(i + 1) + ", observation " + std::to_string(t + 1) +
         ", good " + std::to_string(k + 1) + ")";
}

void require_shape(std::size_t n, std::size_t t, std::size_t k) {
  if (n == 0 || t == 0 || k == 0) throw DomainError("panel dimensions must be positive");
}

void require_positive_prices(std::span<const Rational> p, std::size_t t) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!p[k].is_positive()) {
      throw NonPositivePrice("price must be positive (observation " + std::to_string(t + 1) +
                             ", good " + std::to_string(k + 1) + ")");
    }
  }
}

}  // namespace

Bundle::Bundle(RationalVector quantities) : q_(std::move(quantities)) {
  for (std::size_t k = 0; k < q_.size(); ++k) {
    if (q_[k].sign() < 0) throw DomainError("negative quantity at good " + std::to_string(k + 1));
  }
}

Bundle implied_bundle(std::span<const Rational> expenditure, std::span<const Rational> prices) {
  if (expenditure.size() != prices.size()) {
    throw DomainError("expenditure and price vectors differ in length");
  }
  RationalVector q;
  q.reserve(prices.size());
  for (std::size_t k = 0; k < prices.size(); ++k) {
    if (!prices[k].is_positive()) {
      throw NonPositivePrice("price must be positive at good " + std::to_string(k + 1));
    }
    if (expenditure[k].sign() < 0) {
      throw DomainError("negative expenditure at good " + std::to_string(k + 1));
    }
    q.push_back(expenditure[k] / prices[k]);
  }
  return Bundle(std::move(q));
}

PanelDataset::PanelDataset(std::size_t consumers, std::size_t observations, std::size_t goods,
                           RationalVector expenditures, RationalVector pbar)
    : n_(consumers), t_(observations), k_(goods), e_(std::move(expenditures)),
      pbar_(std::move(pbar)) {
  require_shape(n_, t_, k_);
  if (e_.size() != n_ * t_ * k_) throw DomainError("expenditure array has the wrong size");
  if (pbar_.size() != t_ * k_) throw DomainError("benchmark price array has the wrong size");
  for (std::size_t t = 0; t < t_; ++t) require_positive_prices(this->pbar(t), t);
  totals_.reserve(n_ * t_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < t_; ++t) {
      auto e = expenditure(i, t);
      for (std::size_t k = 0; k < k_; ++k) {
        if (e[k].sign() < 0) throw DomainError("negative expenditure" + at_index(i, t, k));
      }
      Rational m = sum(e);
      if (!m.is_positive()) {
        throw DomainError("total expenditure must be positive (consumer " +
                          std::to_string(i + 1) + ", observation " +
                          std::to_string(t + 1) + ")");
      }
      totals_.push_back(std::move(m));
    }
  }
}

std::span<const Rational> PanelDataset::expenditure(std::size_t i, std::size_t t) const {
  return std::span<const Rational>(e_).subspan((i * t_ + t) * k_, k_);
}

std::span<const Rational> PanelDataset::pbar(std::size_t t) const {
  return std::span<const Rational>(pbar_).subspan(t * k_, k_);
}

Bundle PanelDataset::bundle_at_pbar(std::size_t i, std::size_t t) const {
  return implied_bundle(expenditure(i, t), pbar(t));
}

PanelDataset PanelDataset::consumer_panel(std::size_t i) const {
  if (i >= n_) throw DomainError("consumer index out of range");
  RationalVector e(e_.begin() + static_cast<std::ptrdiff_t>(i * t_ * k_),
                   e_.begin() + static_cast<std::ptrdiff_t>((i + 1) * t_ * k_));
  return PanelDataset(1, t_, k_, std::move(e), pbar_);
}

HeterogeneousPrices::HeterogeneousPrices(std::size_t consumers, std::size_t observations,
                                         std::size_t goods, RationalVector prices,
                                         std::optional<RationalVector> stable_scales)
    : n_(consumers), t_(observations), k_(goods), p_(std::move(prices)),
      scales_(std::move(stable_scales)) {
  require_shape(n_, t_, k_);
  if (p_.size() != n_ * t_ * k_) throw DomainError("price array has the wrong size");
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < t_; ++t) {
      auto p = at(i, t);
      for (std::size_t k = 0; k < k_; ++k) {
        if (!p[k].is_positive()) throw NonPositivePrice("price must be positive" + at_index(i, t, k));
      }
    }
  }
  if (scales_) {
    if (scales_->size() != n_ * k_) throw DomainError("stable scale array has the wrong size");
    for (const auto& s : *scales_) {
      if (!s.is_positive()) throw DomainError("stable scales must be positive");
    }
  }
}

HeterogeneousPrices HeterogeneousPrices::stable(const PanelDataset& panel, RationalVector scales) {
  const std::size_t n = panel.consumers(), t_count = panel.observations(), k_count = panel.goods();
  if (scales.size() != n * k_count) throw DomainError("stable scale array has the wrong size");
  RationalVector p;
  p.reserve(n * t_count * k_count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      auto pbar = panel.pbar(t);
      for (std::size_t k = 0; k < k_count; ++k) p.push_back(scales[i * k_count + k] * pbar[k]);
    }
  }
  return HeterogeneousPrices(n, t_count, k_count, std::move(p), std::move(scales));
}

std::span<const Rational> HeterogeneousPrices::at(std::size_t i, std::size_t t) const {
  return std::span<const Rational>(p_).subspan((i * t_ + t) * k_, k_);
}

void HeterogeneousPrices::check_against(const PanelDataset& panel) const {
  if (panel.consumers() != n_ || panel.observations() != t_ || panel.goods() != k_) {
    throw DomainError("heterogeneous prices and panel differ in shape");
  }
  if (!scales_) return;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < t_; ++t) {
      auto p = at(i, t);
      auto pbar = panel.pbar(t);
      for (std::size_t k = 0; k < k_; ++k) {
        if (p[k] != (*scales_)[i * k_ + k] * pbar[k]) {
          throw DomainError("prices are not the recorded stable rescaling" + at_index(i, t, k));
        }
      }
    }
  }
}

AggregateDemandData::AggregateDemandData(std::size_t consumers, std::size_t observations,
                                         std::size_t goods, RationalVector expenditures,
                                         RationalVector aggregate)
    : n_(consumers), t_(observations), k_(goods), e_(std::move(expenditures)),
      xbar_(std::move(aggregate)) {
  require_shape(n_, t_, k_);
  if (e_.size() != n_ * t_ * k_) throw DomainError("expenditure array has the wrong size");
  if (xbar_.size() != t_ * k_) throw DomainError("aggregate demand array has the wrong size");
  for (std::size_t t = 0; t < t_; ++t) {
    for (std::size_t k = 0; k < k_; ++k) {
      if (xbar_[t * k_ + k].sign() < 0) {
        throw DomainError("aggregate demand must be nonnegative (observation " +
                          std::to_string(t + 1) + ", good " + std::to_string(k + 1) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t t = 0; t < t_; ++t) {
      auto e = expenditure(i, t);
      for (std::size_t k = 0; k < k_; ++k) {
        if (e[k].sign() < 0) throw DomainError("negative expenditure" + at_index(i, t, k));
      }
    }
  }
}

std::span<const Rational> AggregateDemandData::expenditure(std::size_t i, std::size_t t) const {
  return std::span<const Rational>(e_).subspan((i * t_ + t) * k_, k_);
}

std::span<const Rational> AggregateDemandData::aggregate(std::size_t t) const {
  return std::span<const Rational>(xbar_).subspan(t * k_, k_);
}

CrossSection::CrossSection(std::size_t goods, std::vector<CrossSectionObservation> observations)
    : k_(goods), n_(0), obs_(std::move(observations)) {
  if (k_ == 0) throw DomainError("cross-section needs at least one good");
  if (obs_.empty()) throw DomainError("cross-section needs at least one observation");
  n_ = obs_[0].points.size();
  if (n_ == 0) throw DomainError("cross-section observations need at least one point");
  for (std::size_t t = 0; t < obs_.size(); ++t) {
    const auto& o = obs_[t];
    const std::string where = " (observation " + std::to_string(t + 1) + ")";
    if (o.pbar.size() != k_) throw DomainError("benchmark price has the wrong length" + where);
    require_positive_prices(o.pbar, t);
    if (!o.total.is_positive()) throw DomainError("budget total must be positive" + where);
    if (o.points.size() != n_) {
      throw DomainError("every observation needs the same number of points" + where);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const auto& e = o.points[j];
      const std::string pw = " (observation " + std::to_string(t + 1) + ", point " +
                             std::to_string(j + 1) + ")";
      if (e.size() != k_) throw DomainError("point has the wrong length" + pw);
      for (const auto& v : e) {
        if (v.sign() < 0) throw DomainError("negative expenditure" + pw);
      }
      if (sum(e) != o.total) throw DomainError("point does not exhaust the budget" + pw);
    }
    if (o.weights) {
      if (o.weights->size() != n_) throw DomainError("weights have the wrong length" + where);
      for (const auto& w : *o.weights) {
        if (!w.is_positive()) throw DomainError("weights must be positive" + where);
      }
      if (sum(*o.weights) != Rational(1)) throw DomainError("weights must sum to one" + where);
    }
  }
}

Bundle CrossSection::bundle(std::size_t t, std::size_t j) const {
  return implied_bundle(obs_[t].points[j], obs_[t].pbar);
}

Rational CrossSection::weight(std::size_t t, std::size_t j) const {
  if (obs_[t].weights) return (*obs_[t].weights)[j];
  return Rational(1, static_cast<long>(n_));
}

bool CrossSection::has_weights() const {
  for (const auto& o : obs_) {
    if (o.weights) return true;
  }
  return false;
}

SortingFunction::SortingFunction(std::vector<std::vector<std::size_t>> assignment)
    : a_(std::move(assignment)) {
  for (std::size_t t = 0; t < a_.size(); ++t) {
    if (a_[t].size() != a_[0].size()) throw DomainError("sorting rows differ in length");
    std::vector<bool> seen(a_[t].size(), false);
    for (std::size_t j : a_[t]) {
      if (j >= seen.size() || seen[j]) {
        throw DomainError("sorting is not a bijection at observation " + std::to_string(t + 1));
      }
      seen[j] = true;
    }
  }
}

PanelDataset sorted_panel(const CrossSection& cs, const SortingFunction& sigma) {
  const std::size_t n = cs.points_per_observation(), t_count = cs.observations(), k = cs.goods();
  if (sigma.observations() != t_count || sigma.types() != n) {
    throw DomainError("sorting does not match the cross-section shape");
  }
  RationalVector e;
  e.reserve(n * t_count * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      const auto& point = cs.at(t).points[sigma(t, i)];
      e.insert(e.end(), point.begin(), point.end());
    }
  }
  RationalVector pbar;
  pbar.reserve(t_count * k);
  for (std::size_t t = 0; t < t_count; ++t) {
    pbar.insert(pbar.end(), cs.at(t).pbar.begin(), cs.at(t).pbar.end());
  }
  return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
}

}  // namespace hetprice
