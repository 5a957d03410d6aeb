#include <gtest/gtest.h>

#include "hetprice/errors.hpp"
#include "hetprice/synth.hpp"
#include "oracles.hpp"

using namespace hetprice;
using namespace hetprice::synth;

TEST(Synth, SameSeedSamePanel) {
  GeneratorSpec spec;
  spec.seed = 77;
  spec.consumers = 3;
  EXPECT_EQ(generate_panel(spec), generate_panel(spec));
  spec.family = Family::leontief;
  EXPECT_EQ(generate_panel(spec), generate_panel(spec));
  auto a = generate_cross_section(spec), b = generate_cross_section(spec);
  for (std::size_t t = 0; t < a.observations(); ++t) EXPECT_EQ(a.at(t).points, b.at(t).points);
}

TEST(Synth, DifferentSeedsDiffer) {
  GeneratorSpec a, b;
  b.seed = 1;
  EXPECT_NE(generate_panel(a), generate_panel(b));
}

TEST(Synth, EqualExponentsSplitEvenly) {
  GeneratorSpec spec;
  spec.goods = 2;
  spec.parameters = std::vector<RationalVector>{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
  auto panel = generate_panel(spec);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(panel.expenditure(i, t)[0], panel.expenditure(i, t)[1]);
  }
}

TEST(Synth, PricesAreDyadicInRange) {
  DyadicRng rng(3);
  for (int n = 0; n < 1000; ++n) {
    Rational p = rng.price();
    EXPECT_GE(p, Rational(1, 4));
    EXPECT_LT(p, Rational(4));
    EXPECT_EQ((p * Rational(1024)).get().get_den(), 1);
  }
}

TEST(Synth, CobbDouglasAndLeontiefStreamsPassGarp) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (Family f : {Family::cobb_douglas, Family::leontief}) {
      GeneratorSpec spec;
      spec.family = f;
      spec.seed = seed;
      spec.consumers = 1 + seed % 4;
      spec.observations = 1 + seed % 5;
      spec.goods = 1 + seed % 4;
      auto panel = generate_panel(spec);
      for (std::size_t i = 0; i < panel.consumers(); ++i) {
        EXPECT_TRUE(oracle::garp_by_chains(revpref::observations_at_pbar(panel, i))) << seed << to_string(f);
      }
    }
  }
}

TEST(Synth, WarpTemplateFailsWithTwoNodeWitness) {
  GeneratorSpec spec;
  spec.family = Family::violation;
  spec.violator = 1;
  auto panel = generate_panel(spec);
  auto v = revpref::check_garp(revpref::observations_at_pbar(panel, 1));
  ASSERT_FALSE(v.satisfied);
  EXPECT_EQ(v.witness->size(), 3u);  // closed: a, b, a
  EXPECT_TRUE(revpref::check_garp(revpref::observations_at_pbar(panel, 0)).satisfied);
}

TEST(Synth, AggregateMatchesPanelShape) {
  GeneratorSpec spec;
  spec.seed = 5;
  auto data = generate_aggregate(spec);
  EXPECT_EQ(data.consumers(), 2u);
  for (std::size_t t = 0; t < data.observations(); ++t) {
    for (const auto& x : data.aggregate(t)) EXPECT_TRUE(x.is_positive());
  }
}

TEST(Synth, SpecJsonRoundTrip) {
  GeneratorSpec spec;
  spec.family = Family::violation;
  spec.seed = 9;
  spec.consumers = 3;
  spec.violator = 2;
  auto back = spec_from_json(spec_to_json(spec));
  EXPECT_EQ(generate_panel(back), generate_panel(spec));
}

TEST(Synth, BadSpecsAreConfigErrors) {
  GeneratorSpec spec;
  spec.parameters = std::vector<RationalVector>{{Rational(1, 2), Rational(1, 4), Rational(1, 4)},
                                                {Rational(1, 2), Rational(1, 2), Rational(1, 2)}};
  EXPECT_THROW(generate_panel(spec), ConfigError);
  GeneratorSpec zero;
  zero.goods = 0;
  EXPECT_THROW(generate_panel(zero), ConfigError);
  GeneratorSpec tmpl;
  tmpl.family = Family::violation;
  tmpl.violation_template = "nope";
  EXPECT_THROW(generate_panel(tmpl), ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json{{"family", "other"}}), SchemaError);
}
