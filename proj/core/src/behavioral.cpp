#include "hetprice/behavioral.hpp"

#include <random>

#include "hetprice/errors.hpp"

namespace hetprice::behavioral {

BehavioralExpenditure BehavioralExpenditure::misperception() {
  BehavioralExpenditure b;
  b.kind_ = PhiKind::misperception;
  b.case_ = RegularityCase::one;
  b.key_ = "misperception";
  b.fn_ = [](const Rational&, const Rational& perceived) { return perceived; };
  return b;
}

BehavioralExpenditure BehavioralExpenditure::reference(std::string f_name, ReferenceFn f,
                                                       RegularityCase c) {
  if (!f) throw ConfigError("reference expenditure needs a function");
  BehavioralExpenditure b;
  b.kind_ = PhiKind::reference;
  b.case_ = c;
  b.key_ = "reference:" + f_name;
  b.fn_ = [f = std::move(f), name = std::move(f_name)](const Rational& e, const Rational& perceived) {
    Rational v = f(e / perceived);
    if (!v.is_positive()) {
      throw EvaluatorDomainError("reference function " + name + " returned a nonpositive value");
    }
    return e * v;
  };
  return b;
}

BehavioralExpenditure BehavioralExpenditure::custom(std::string name, PhiFn phi, RegularityCase c) {
  if (!phi) throw ConfigError("custom expenditure needs a callable");
  BehavioralExpenditure b;
  b.kind_ = PhiKind::custom;
  b.case_ = c;
  b.key_ = std::move(name);
  b.fn_ = std::move(phi);
  return b;
}

Rational eval_phi(const BehavioralExpenditure& phi, const Rational& e, const Rational& perceived) {
  if (!e.is_positive() || !perceived.is_positive()) {
    throw EvaluatorDomainError("behavioral expenditure needs positive arguments, got (" +
                               e.to_string() + ", " + perceived.to_string() + ")");
  }
  return phi.fn()(e, perceived);
}

std::vector<revpref::PriceSystem> make_price_systems(const PanelDataset& panel,
                                                     std::span<const Rational> lambda,
                                                     const BehavioralExpenditure& phi) {
  if (lambda.size() != panel.consumers()) throw DomainError("one scale per consumer is required");
  std::vector<revpref::PriceSystem> out;
  out.reserve(panel.consumers() * panel.observations());
  for (std::size_t i = 0; i < panel.consumers(); ++i) {
    if (!lambda[i].is_positive()) throw DomainError("scales must be positive");
    for (std::size_t t = 0; t < panel.observations(); ++t) {
      auto pb = panel.pbar(t);
      RationalVector pbar(pb.begin(), pb.end());
      RationalVector perceived;
      for (const auto& v : pbar) perceived.push_back(lambda[i] * v);
      Rational scale = lambda[i];
      auto f = [phi, pbar, scale](const Bundle& x) {
        Rational e = dot(pbar, x.values());
        return eval_phi(phi, e, scale * e);
      };
      out.emplace_back(std::move(f), revpref::BehavioralTag{phi.key(), std::move(pbar), std::move(perceived)});
    }
  }
  return out;
}

void check_monotone_along_rays(const BehavioralExpenditure& phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&] { return Rational(static_cast<long>(rng() % 8192 + 1), 512); };
  for (int trial = 0; trial < 64; ++trial) {
    Rational alpha = draw();
    Rational e1 = draw();
    Rational e2 = e1 + draw();
    if (eval_phi(phi, e1, alpha * e1) >= eval_phi(phi, e2, alpha * e2)) {
      throw RegularityError("phi(e, alpha e) is not strictly increasing in e for " + phi.key() +
                            " at alpha = " + alpha.to_string());
    }
  }
}

BehavioralExpenditure from_key(std::string_view key) {
  if (key == "misperception") return BehavioralExpenditure::misperception();
  if (key == "reference:max1") {
    return BehavioralExpenditure::reference(
        "max1", [](const Rational& r) { return r > Rational(1) ? r : Rational(1); },
        RegularityCase::two);
  }
  if (key == "reference:square") {
    return BehavioralExpenditure::reference(
        "square", [](const Rational& r) { return r * r; }, RegularityCase::two);
  }
  if (key == "reference:inverse-max1") {
    return BehavioralExpenditure::reference(
        "inverse-max1",
        [](const Rational& r) {
          Rational inv = r.inverse();
          return inv > Rational(1) ? inv : Rational(1);
        },
        RegularityCase::one);
  }
  throw ConfigError("unknown behavioral expenditure \"" + std::string(key) + "\"");
}

}  // namespace hetprice::behavioral
