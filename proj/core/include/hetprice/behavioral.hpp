#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetprice/dataset.hpp"
#include "hetprice/revpref.hpp"

// Behavioral expenditure functions phi(e, e') combining the true cost e of a
// bundle with its perceived cost e'.
namespace hetprice::behavioral {

// Case one: phi(a, x) dominates any fixed value as x grows.
// Case two: phi(a, x) dominates any fixed value as x shrinks to zero.
enum class RegularityCase { one = 1, two = 2 };

enum class PhiKind { misperception, reference, custom };

using PhiFn = std::function<Rational(const Rational& e, const Rational& perceived)>;
using ReferenceFn = std::function<Rational(const Rational& ratio)>;

class BehavioralExpenditure {
 public:
  // phi(e, e') = e'. Case one.
  static BehavioralExpenditure misperception();
  // phi(e, e') = e * f(e / e'). f must be positive.
  static BehavioralExpenditure reference(std::string f_name, ReferenceFn f, RegularityCase c);
  static BehavioralExpenditure custom(std::string name, PhiFn phi, RegularityCase c);

  PhiKind kind() const { return kind_; }
  RegularityCase regularity_case() const { return case_; }
  // Stable identifier, e.g. "misperception" or "reference:max1".
  const std::string& key() const { return key_; }
  const PhiFn& fn() const { return fn_; }

 private:
  PhiKind kind_ = PhiKind::misperception;
  RegularityCase case_ = RegularityCase::one;
  std::string key_;
  PhiFn fn_;
};

// Throws EvaluatorDomainError unless both arguments are positive.
Rational eval_phi(const BehavioralExpenditure& phi, const Rational& e, const Rational& perceived);

// f^{i,t}(x) = phi(pbar^t . x, lambda_i pbar^t . x), returned in i * T + t
// order.
std::vector<revpref::PriceSystem> make_price_systems(const PanelDataset& panel,
                                                     std::span<const Rational> lambda,
                                                     const BehavioralExpenditure& phi);

// Sampled check that phi(e, alpha e) strictly increases in e. Throws
// RegularityError on a counterexample.
void check_monotone_along_rays(const BehavioralExpenditure& phi, std::uint64_t seed);

// "misperception", "reference:max1" (f(r) = max(r, 1), case two),
// "reference:square" (f(r) = r^2, case two), "reference:inverse-max1"
// (f(r) = max(1/r, 1), case one).
BehavioralExpenditure from_key(std::string_view key);

}  // namespace hetprice::behavioral
