#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hetprice/dataset.hpp"

// Seeded generators with known answers: rationalizable-by-construction
// panels, embedded violations, and unstructured stress panels. Every value
// is a rational; prices are dyadic.
namespace hetprice::synth {

enum class Family {
  cobb_douglas,  // e = alpha_i * m, each consumer maximizes its own utility
  leontief,      // x proportional to a_i
  violation,     // cobb_douglas with one consumer replaced by a template
  arbitrary,     // independent dyadic expenditures, no structure
};

struct GeneratorSpec {
  Family family = Family::cobb_douglas;
  std::uint64_t seed = 0;
  std::size_t consumers = 2;
  std::size_t observations = 4;
  std::size_t goods = 3;
  // Per-consumer Cobb-Douglas exponents or Leontief weights; drawn from the
  // seed when absent.
  std::optional<std::vector<RationalVector>> parameters;
  // violation family only
  std::string violation_template = "warp-2cycle";
  std::size_t violator = 0;
};

// Deterministic source of dyadic rationals on top of mt19937_64. Avoids the
// standard distributions, whose output is implementation defined.
class DyadicRng {
 public:
  explicit DyadicRng(std::uint64_t seed);
  std::uint64_t next();
  // Uniform integer in [lo, hi].
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi);
  // (1 + j/256) * 2^e with j in [0, 255] and e in [-2, 1]: roughly
  // log-uniform on [1/4, 4).
  Rational price();
  // Dyadic in [lo, hi) on a 2^-bits grid.
  Rational uniform(const Rational& lo, const Rational& hi, int bits = 10);

 private:
  std::mt19937_64 engine_;
};

// Throws ConfigError on an invalid spec.
void validate(const GeneratorSpec& spec);

PanelDataset generate_panel(const GeneratorSpec& spec);

// Cross-section whose identity sorting is consistent: every type follows the
// family's demand on a common budget, then points are shuffled per
// observation. Families other than cobb_douglas and leontief are rejected.
CrossSection generate_cross_section(const GeneratorSpec& spec);

// Expenditures from generate_panel with a strictly positive aggregate demand.
AggregateDemandData generate_aggregate(const GeneratorSpec& spec);

GeneratorSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const GeneratorSpec& spec);
const char* to_string(Family f);

}  // namespace hetprice::synth
