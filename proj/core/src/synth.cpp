#include "hetprice/synth.hpp"

#include <numeric>

#include "hetprice/errors.hpp"
#include "hetprice/io.hpp"

namespace hetprice::synth {

DyadicRng::DyadicRng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t DyadicRng::next() { return engine_(); }

std::uint64_t DyadicRng::integer(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return lo + next();  // full 64-bit range
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return lo + v % span;
}

Rational DyadicRng::price() {
  auto mantissa = static_cast<long>(integer(0, 255));
  int exponent = static_cast<int>(integer(0, 3)) - 2;
  return Rational(256 + mantissa, 256) * Rational::pow2(exponent);
}

Rational DyadicRng::uniform(const Rational& lo, const Rational& hi, int bits) {
  auto j = static_cast<long>(integer(0, (std::uint64_t{1} << bits) - 1));
  return lo + (hi - lo) * Rational(j) * Rational::pow2(-bits);
}

const char* to_string(Family f) {
  switch (f) {
    case Family::cobb_douglas: return "cobb_douglas";
    case Family::leontief: return "leontief";
    case Family::violation: return "violation";
    case Family::arbitrary: return "arbitrary";
  }
  return "cobb_douglas";
}

void validate(const GeneratorSpec& spec) {
  if (spec.consumers == 0 || spec.observations == 0 || spec.goods == 0) {
    throw ConfigError("consumers, observations and goods must be positive");
  }
  if (spec.parameters) {
    if (spec.parameters->size() != spec.consumers) throw ConfigError("one parameter vector per consumer is required");
    for (const auto& a : *spec.parameters) {
      if (a.size() != spec.goods) throw ConfigError("parameter vectors need one entry per good");
      for (const auto& v : a) {
        if (!v.is_positive()) throw ConfigError("parameters must be positive");
      }
      if (spec.family != Family::leontief && sum(a) != Rational(1)) {
        throw ConfigError("Cobb-Douglas exponents must sum to one");
      }
    }
  }
  if (spec.family == Family::violation) {
    if (spec.violation_template != "warp-2cycle") {
      throw ConfigError("unknown violation template '" + spec.violation_template + "'");
    }
    if (spec.goods < 2 || spec.observations < 2) throw ConfigError("warp-2cycle needs two goods and two observations");
    if (spec.violator >= spec.consumers) throw ConfigError("violator index out of range");
  }
}

namespace {

std::vector<RationalVector> draw_parameters(const GeneratorSpec& spec, DyadicRng& rng) {
  if (spec.parameters) return *spec.parameters;
  std::vector<RationalVector> out;
  for (std::size_t i = 0; i < spec.consumers; ++i) {
    RationalVector a(spec.goods);
    for (auto& v : a) v = Rational(static_cast<long>(rng.integer(1, 16)));
    if (spec.family != Family::leontief) {
      Rational total = sum(a);
      for (auto& v : a) v /= total;
    }
    out.push_back(std::move(a));
  }
  return out;
}

// Expenditure of a consumer with parameters a on budget (pbar, m).
RationalVector demand(Family family, const RationalVector& a, std::span<const Rational> pbar,
                      const Rational& m) {
  RationalVector e(a.size());
  if (family == Family::leontief) {
    Rational cost = dot(pbar, a);
    for (std::size_t k = 0; k < a.size(); ++k) e[k] = m * pbar[k] * a[k] / cost;
  } else {
    for (std::size_t k = 0; k < a.size(); ++k) e[k] = a[k] * m;
  }
  return e;
}

Rational draw_total(DyadicRng& rng) { return rng.uniform(Rational(1), Rational(16), 6); }

}  // namespace

PanelDataset generate_panel(const GeneratorSpec& spec) {
  validate(spec);
  DyadicRng rng(spec.seed);
  const std::size_t n = spec.consumers, t_count = spec.observations, k = spec.goods;
  RationalVector pbar;
  for (std::size_t j = 0; j < t_count * k; ++j) pbar.push_back(rng.price());

  if (spec.family == Family::violation) {
    // Budgets of the two-observation WARP fixture on goods 1 and 2.
    for (std::size_t j = 0; j < k; ++j) {
      pbar[j] = 1;
      pbar[k + j] = 1;
    }
    pbar[1] = 2;
    pbar[k] = 2;
  }

  RationalVector e;
  e.reserve(n * t_count * k);
  if (spec.family == Family::arbitrary) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t j = 0; j < k; ++j) {
          // Goods 1 and 2 stay positive so every construction applies.
          auto lo = j < 2 ? 1u : 0u;
          e.push_back(Rational(static_cast<long>(rng.integer(lo, 64)), 16));
        }
      }
    }
    return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
  }

  auto params = draw_parameters(spec, rng);
  const Family demand_family = spec.family == Family::leontief ? Family::leontief : Family::cobb_douglas;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      RationalVector et = demand(demand_family, params[i],
                                 std::span<const Rational>(pbar).subspan(t * k, k), draw_total(rng));
      if (spec.family == Family::violation && i == spec.violator && t < 2) {
        std::fill(et.begin(), et.end(), Rational(0));
        et[0] = t == 0 ? 1 : 3;
        et[1] = t == 0 ? 3 : 1;
      }
      e.insert(e.end(), et.begin(), et.end());
    }
  }
  return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
}

CrossSection generate_cross_section(const GeneratorSpec& spec) {
  validate(spec);
  if (spec.family != Family::cobb_douglas && spec.family != Family::leontief) {
    throw ConfigError("cross-sections are generated for the cobb_douglas and leontief families only");
  }
  DyadicRng rng(spec.seed);
  auto params = draw_parameters(spec, rng);
  std::vector<CrossSectionObservation> obs;
  for (std::size_t t = 0; t < spec.observations; ++t) {
    CrossSectionObservation o;
    for (std::size_t j = 0; j < spec.goods; ++j) o.pbar.push_back(rng.price());
    o.total = draw_total(rng);
    for (std::size_t i = 0; i < spec.consumers; ++i) o.points.push_back(demand(spec.family, params[i], o.pbar, o.total));
    // Fisher-Yates with the generator's own integers.
    for (std::size_t i = o.points.size(); i > 1; --i) {
      std::swap(o.points[i - 1], o.points[rng.integer(0, i - 1)]);
    }
    obs.push_back(std::move(o));
  }
  return CrossSection(spec.goods, std::move(obs));
}

AggregateDemandData generate_aggregate(const GeneratorSpec& spec) {
  PanelDataset panel = generate_panel(spec);
  DyadicRng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  RationalVector xbar;
  for (std::size_t j = 0; j < spec.observations * spec.goods; ++j) {
    xbar.push_back(rng.uniform(Rational(1, 4), Rational(8), 8));
  }
  return AggregateDemandData(panel.consumers(), panel.observations(), panel.goods(),
                             panel.raw_expenditures(), std::move(xbar));
}

GeneratorSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("generator spec must be an object");
  GeneratorSpec spec;
  try {
    std::string family = j.value("family", std::string("cobb_douglas"));
    if (family == "cobb_douglas") spec.family = Family::cobb_douglas;
    else if (family == "leontief") spec.family = Family::leontief;
    else if (family == "violation") spec.family = Family::violation;
    else if (family == "arbitrary") spec.family = Family::arbitrary;
    else throw SchemaError("unknown family '" + family + "'");
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.consumers = j.value("consumers", spec.consumers);
    spec.observations = j.value("observations", spec.observations);
    spec.goods = j.value("goods", spec.goods);
    spec.violation_template = j.value("template", spec.violation_template);
    spec.violator = j.value("violator", spec.violator);
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("generator spec: ") + ex.what());
  }
  if (j.contains("parameters")) {
    std::vector<RationalVector> params;
    for (const auto& row : j.at("parameters")) params.push_back(io::vector_from_json(row));
    spec.parameters = std::move(params);
  }
  validate(spec);
  return spec;
}

nlohmann::json spec_to_json(const GeneratorSpec& spec) {
  nlohmann::json j{{"family", to_string(spec.family)},
                   {"seed", spec.seed},
                   {"consumers", spec.consumers},
                   {"observations", spec.observations},
                   {"goods", spec.goods}};
  if (spec.parameters) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& a : *spec.parameters) rows.push_back(io::vector_to_json(a));
    j["parameters"] = std::move(rows);
  }
  if (spec.family == Family::violation) {
    j["template"] = spec.violation_template;
    j["violator"] = spec.violator;
  }
  return j;
}

}  // namespace hetprice::synth
