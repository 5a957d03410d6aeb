#include "hetprice/aggregators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "hetprice/errors.hpp"

namespace hetprice::aggregators {

namespace {

constexpr int kBracketSteps = 200;
constexpr int kBisectionSteps = 4000;
constexpr int kGeometricBits = 96;

void require_positive(std::span<const Rational> p) {
  for (const auto& v : p) {
    if (!v.is_positive()) throw NonPositivePrice("aggregator input must be positive");
  }
}

RationalVector fill(std::span<const Rational> fixed, std::size_t free_index, const Rational& x) {
  RationalVector v(fixed.begin(), fixed.end());
  v.insert(v.begin() + static_cast<std::ptrdiff_t>(free_index), x);
  return v;
}

// Solves h(x) = target for increasing h by bracket expansion and bisection.
template <typename H>
Rational bisect(const H& h, const Rational& target) {
  const Rational tol = solver_tolerance() * target;
  auto close = [&](const Rational& v) { return (v - target).abs() <= tol; };
  Rational lo = target, hi = target;
  Rational v = h(target);
  if (close(v)) return target;
  int steps = 0;
  if (v < target) {
    do {
      lo = hi;
      hi = hi * 2;
      if (++steps > kBracketSteps) throw NoBracket("no upper bracket within 2^200 of the target");
    } while (h(hi) < target);
  } else {
    do {
      hi = lo;
      lo = lo / 2;
      if (++steps > kBracketSteps) throw NoBracket("no lower bracket within 2^-200 of the target");
    } while (h(lo) > target);
  }
  for (int k = 0; k < kBisectionSteps; ++k) {
    Rational mid = (lo + hi) / 2;
    Rational hm = h(mid);
    if (close(hm)) return mid;
    if (hm < target) {
      lo = std::move(mid);
    } else {
      hi = std::move(mid);
    }
  }
  throw NoBracket("bisection did not reach the solver tolerance");
}

Rational snap_bits(const mpf_class& y, int bits) {
  long exp = 0;
  mpf_get_d_2exp(&exp, y.get_mpf_t());
  mpq_class yq;
  mpq_set_f(yq.get_mpq_t(), y.get_mpf_t());
  long shift = bits - exp;
  Rational scale = Rational::pow2(static_cast<int>(shift));
  mpq_class scaled = yq * scale.get();
  mpz_class n = scaled.get_num() / scaled.get_den();
  mpq_class rem = scaled - mpq_class(n);
  if (rem * 2 >= 1) n += 1;
  return Rational(mpq_class(n)) / scale;
}

Rational geometric_eval(std::span<const Rational> p) {
  require_positive(p);
  const std::size_t n = p.size();
  if (n == 1) return p[0];
  mpq_class prod = 1;
  for (const auto& v : p) prod *= v.get();
  const mp_bitcnt_t prec = 320;
  mpf_class big(0, prec);
  big = prod;
  long e = 0;
  double d = mpf_get_d_2exp(&e, big.get_mpf_t());
  const long nn = static_cast<long>(n);
  long q = e >= 0 ? e / nn : -((-e + nn - 1) / nn);
  long r = e - q * nn;
  double guess = std::ldexp(std::pow(d * std::ldexp(1.0, static_cast<int>(r)), 1.0 / n), static_cast<int>(q));
  mpf_class y(guess, prec);
  for (int it = 0; it < 200; ++it) {
    mpf_class yn1(1, prec);
    mpf_pow_ui(yn1.get_mpf_t(), y.get_mpf_t(), n - 1);
    mpf_class next(0, prec);
    next = ((nn - 1) * y + big / yn1) / nn;
    mpf_class diff(0, prec);
    diff = abs(next - y);
    y = next;
    mpf_class rel(0, prec);
    rel = diff / y;
    if (rel == 0 || mpf_cmp_d(rel.get_mpf_t(), std::ldexp(1.0, -200)) < 0) break;
  }
  return snap_bits(y, kGeometricBits);
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, PluginFactory>& registry() {
  static std::map<std::string, PluginFactory> r{{"geometric", geometric_mean}};
  return r;
}

}  // namespace

AggregatorSpec AggregatorSpec::arithmetic() { return AggregatorSpec(); }

AggregatorSpec AggregatorSpec::weighted_arithmetic(RationalVector weights) {
  for (const auto& w : weights) {
    if (!w.is_positive()) throw ConfigError("weighted arithmetic mean needs positive weights");
  }
  if (sum(weights) != Rational(1)) throw ConfigError("weighted arithmetic weights must sum to one");
  AggregatorSpec s;
  s.kind_ = Kind::weighted_arithmetic;
  s.name_ = "weighted-arithmetic";
  s.weights_ = std::move(weights);
  return s;
}

AggregatorSpec AggregatorSpec::weighted_harmonic(RationalVector weights) {
  for (const auto& w : weights) {
    if (w.sign() < 0) throw ConfigError("harmonic weights must be nonnegative");
  }
  if (!sum(weights).is_positive()) throw ConfigError("harmonic weights must have positive mass");
  AggregatorSpec s;
  s.kind_ = Kind::weighted_harmonic;
  s.name_ = "harmonic";
  s.weights_ = std::move(weights);
  s.diverges_ = false;
  s.vanishes_ = true;
  return s;
}

AggregatorSpec AggregatorSpec::harmonic_mean(std::size_t n) {
  if (n == 0) throw ConfigError("harmonic mean needs at least one coordinate");
  return weighted_harmonic(RationalVector(n, Rational(1)));
}

AggregatorSpec AggregatorSpec::custom(std::string name, CustomFn fn, std::vector<Regularity> declared,
                                      bool homogeneous_degree_one) {
  if (!fn) throw ConfigError("custom aggregator needs a callable");
  if (declared.empty()) {
    throw ConfigError("custom aggregator \"" + name + "\" declares no regularity case");
  }
  AggregatorSpec s;
  s.kind_ = Kind::custom;
  s.name_ = std::move(name);
  s.fn_ = std::move(fn);
  s.diverges_ = false;
  s.vanishes_ = false;
  for (auto r : declared) {
    if (r == Regularity::diverges_at_infinity) s.diverges_ = true;
    if (r == Regularity::vanishes_at_zero) s.vanishes_ = true;
  }
  s.homogeneous_ = homogeneous_degree_one;
  return s;
}

bool AggregatorSpec::satisfies(Regularity r) const {
  return r == Regularity::diverges_at_infinity ? diverges_ : vanishes_;
}

Rational solver_tolerance() { return Rational::pow2(-60); }

Rational eval(const AggregatorSpec& w, std::span<const Rational> prices) {
  if (prices.empty()) throw DomainError("aggregator needs at least one price");
  require_positive(prices);
  switch (w.kind()) {
    case Kind::arithmetic:
      return sum(prices) / Rational(static_cast<long>(prices.size()));
    case Kind::weighted_arithmetic:
      if (w.weights().size() != prices.size()) throw DomainError("aggregator arity mismatch");
      return dot(w.weights(), prices);
    case Kind::weighted_harmonic: {
      if (w.weights().size() != prices.size()) throw DomainError("aggregator arity mismatch");
      Rational acc = 0;
      for (std::size_t i = 0; i < prices.size(); ++i) acc += w.weights()[i] / prices[i];
      return sum(w.weights()) / acc;
    }
    case Kind::custom: {
      Rational v = w.custom_fn()(prices);
      if (!v.is_positive()) throw DomainError("custom aggregator returned a nonpositive value");
      return v;
    }
  }
  throw std::logic_error("unknown aggregator kind");
}

Rational solve_residual(const AggregatorSpec& w, const Rational& target,
                        std::span<const Rational> fixed, std::size_t free_index) {
  if (!target.is_positive()) throw DomainError("residual target must be positive");
  if (free_index > fixed.size()) throw DomainError("free index out of range");
  require_positive(fixed);
  const std::size_t n = fixed.size() + 1;
  Rational p;
  switch (w.kind()) {
    case Kind::arithmetic:
      p = Rational(static_cast<long>(n)) * target - sum(fixed);
      break;
    case Kind::weighted_arithmetic: {
      if (w.weights().size() != n) throw DomainError("aggregator arity mismatch");
      Rational rest = 0;
      for (std::size_t j = 0, f = 0; j < n; ++j) {
        if (j == free_index) continue;
        rest += w.weights()[j] * fixed[f++];
      }
      p = (target - rest) / w.weights()[free_index];
      break;
    }
    case Kind::weighted_harmonic: {
      if (w.weights().size() != n) throw DomainError("aggregator arity mismatch");
      const Rational& ef = w.weights()[free_index];
      if (ef.is_zero()) throw NoBracket("free coordinate carries zero harmonic weight");
      Rational denom = sum(w.weights()) / target;
      for (std::size_t j = 0, f = 0; j < n; ++j) {
        if (j == free_index) continue;
        denom -= w.weights()[j] / fixed[f++];
      }
      if (!denom.is_positive()) throw NoBracket("fixed prices already exceed the harmonic target");
      p = ef / denom;
      break;
    }
    case Kind::custom:
      return bisect([&](const Rational& x) { return eval(w, fill(fixed, free_index, x)); }, target);
  }
  if (!p.is_positive()) throw NoBracket("residual price would be nonpositive (" + p.to_string() + ")");
  return p;
}

Rational solve_common(const AggregatorSpec& w, const Rational& target, const Rational& pinned,
                      std::size_t pinned_index, std::size_t arity) {
  if (arity < 2) throw DomainError("common solve needs at least two coordinates");
  if (pinned_index >= arity) throw DomainError("pinned index out of range");
  if (!target.is_positive() || !pinned.is_positive()) throw DomainError("inputs must be positive");
  Rational q;
  switch (w.kind()) {
    case Kind::arithmetic:
      q = (Rational(static_cast<long>(arity)) * target - pinned) / Rational(static_cast<long>(arity - 1));
      break;
    case Kind::weighted_arithmetic: {
      if (w.weights().size() != arity) throw DomainError("aggregator arity mismatch");
      const Rational& wp = w.weights()[pinned_index];
      q = (target - wp * pinned) / (Rational(1) - wp);
      break;
    }
    case Kind::weighted_harmonic: {
      if (w.weights().size() != arity) throw DomainError("aggregator arity mismatch");
      const Rational& ep = w.weights()[pinned_index];
      Rational rest = sum(w.weights()) - ep;
      if (rest.is_zero()) throw NoBracket("free coordinates carry zero harmonic weight");
      Rational denom = sum(w.weights()) / target - ep / pinned;
      if (!denom.is_positive()) throw NoBracket("pinned price already exceeds the harmonic target");
      q = rest / denom;
      break;
    }
    case Kind::custom:
      return bisect(
          [&](const Rational& x) {
            RationalVector v(arity, x);
            v[pinned_index] = pinned;
            return eval(w, v);
          },
          target);
  }
  if (!q.is_positive()) throw NoBracket("common price would be nonpositive (" + q.to_string() + ")");
  return q;
}

AggregatorSpec geometric_mean() {
  return AggregatorSpec::custom("geometric", geometric_eval,
                                {Regularity::diverges_at_infinity, Regularity::vanishes_at_zero}, true);
}

void validate_custom(const AggregatorSpec& w, std::size_t arity, std::uint64_t seed) {
  if (w.kind() != Kind::custom) return;
  std::mt19937_64 rng(seed);
  auto draw = [&] { return Rational(static_cast<long>(rng() % 4096 + 1), 256); };
  const Rational tol = solver_tolerance();
  for (int trial = 0; trial < 16; ++trial) {
    Rational q = draw();
    Rational v = eval(w, RationalVector(arity, q));
    if ((v - q).abs() > tol * q) {
      throw ConfigError("custom aggregator \"" + w.name() + "\" does not return q at (q, ..., q)");
    }
    RationalVector p(arity);
    for (auto& x : p) x = draw();
    Rational base = eval(w, p);
    for (std::size_t k = 0; k < arity; ++k) {
      RationalVector bumped = p;
      bumped[k] = bumped[k] * 2;
      if (eval(w, bumped) <= base) {
        throw ConfigError("custom aggregator \"" + w.name() + "\" is not strictly increasing");
      }
    }
  }
}

void register_plugin(const std::string& name, PluginFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

AggregatorSpec from_name(std::string_view name, std::size_t arity) {
  if (name == "arithmetic") return AggregatorSpec::arithmetic();
  if (name == "harmonic") return AggregatorSpec::harmonic_mean(arity);
  std::lock_guard lock(registry_mutex());
  auto it = registry().find(std::string(name));
  if (it == registry().end()) throw ConfigError("unknown aggregator \"" + std::string(name) + "\"");
  return it->second();
}

}  // namespace hetprice::aggregators
