#include <gtest/gtest.h>

#include "hetprice/constructions.hpp"
#include "hetprice/fixtures.hpp"
#include "hetprice/rum.hpp"
#include "hetprice/synth.hpp"
#include "oracles.hpp"

using namespace hetprice;
using namespace hetprice::rum;
using aggregators::AggregatorSpec;

TEST(OneGood, FourGoodExampleIsRefuted) {
  auto panel = fixtures::four_good_example();
  auto r = check_one_good_refutation(panel, 0, AggregatorSpec::arithmetic());
  EXPECT_EQ(r.outcome, OneGoodOutcome::refuted);
  EXPECT_EQ(r.method, "interval");
  EXPECT_EQ(r.triple, (std::vector<std::size_t>{1, 2, 3}));
  ASSERT_EQ(r.pairs.size(), 6u);
  for (const auto& f : r.pairs) {
    ASSERT_TRUE(f.band_lo && f.band_hi);
    EXPECT_EQ(*f.band_lo, Rational(1, 5));
    EXPECT_EQ(*f.band_hi, Rational(5));
    EXPECT_EQ(f.ratio_lo, Rational(1, 2));
    EXPECT_EQ(f.ratio_hi, Rational(2));
  }
  EXPECT_FALSE(r.trace.empty());
}

TEST(OneGood, BandMatchesDirectPreferenceCheck) {
  // At a ratio inside (1/5, 5) the agent's two bundles are strictly
  // preferred to each other; just outside, one preference fails.
  auto panel = fixtures::four_good_example();
  auto stream = [&](const Rational& r) {
    return oracle::at_prices(panel, 0, [&](std::size_t t) {
      RationalVector p(panel.pbar(t).begin(), panel.pbar(t).end());
      if (t == 2) p[0] = r;
      if (t == 1) p[0] = 1;
      return p;
    });
  };
  auto mutual = [&](const Rational& r) {
    auto obs = stream(r);
    auto c = oracle::cost_table(obs);
    return c[1][1] > c[1][2] && c[2][2] > c[2][1];
  };
  EXPECT_TRUE(mutual(Rational(1, 2)));
  EXPECT_TRUE(mutual(Rational(49, 10)));
  EXPECT_FALSE(mutual(Rational(5)));
  EXPECT_FALSE(mutual(Rational(1, 5)));
}

TEST(OneGood, TwoGoodHeterogeneityFixesTheExample) {
  auto panel = fixtures::four_good_example();
  auto r = constructions::prop1_rationalize(
      panel, constructions::AggregatorGrid::uniform(AggregatorSpec::arithmetic(), 4, 4));
  EXPECT_TRUE(oracle::garp_by_chains(revpref::pooled_observations(panel, r.prices)));
}

TEST(OneGood, HomogeneousConsistentPanelIsNotRefuted) {
  synth::GeneratorSpec spec;
  spec.seed = 12;
  spec.consumers = 2;
  spec.observations = 3;
  spec.goods = 2;
  spec.parameters = std::vector<RationalVector>{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
  auto panel = synth::generate_panel(spec);
  auto r = check_one_good_refutation(panel, 0, AggregatorSpec::arithmetic());
  EXPECT_EQ(r.outcome, OneGoodOutcome::not_refuted);
  ASSERT_TRUE(r.consistent_prices);
  // The returned prices aggregate to pbar and make the pooled data consistent.
  RationalVector flat;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_EQ(((*r.consistent_prices)[0][t] + (*r.consistent_prices)[1][t]) / Rational(2), panel.pbar(t)[0]);
      RationalVector p(panel.pbar(t).begin(), panel.pbar(t).end());
      p[0] = (*r.consistent_prices)[i][t];
      flat.insert(flat.end(), p.begin(), p.end());
    }
  }
  HeterogeneousPrices prices(2, 3, 2, flat);
  EXPECT_TRUE(oracle::garp_by_chains(revpref::pooled_observations(panel, prices)));
}

TEST(OneGood, OnlyTwoConsumers) {
  auto panel = oracle::random_panel(1, 3, 2, 2);
  auto r = check_one_good_refutation(panel, 0, AggregatorSpec::arithmetic());
  EXPECT_EQ(r.outcome, OneGoodOutcome::unknown);
  EXPECT_EQ(r.method, "none");
}

TEST(OneGood, TinyBudgetIsUnknown) {
  auto panel = oracle::random_panel(4, 2, 3, 3);
  auto r = check_one_good_refutation(panel, 1, AggregatorSpec::harmonic_mean(2), 1);
  EXPECT_EQ(r.outcome, OneGoodOutcome::unknown);
  EXPECT_EQ(r.method, "grid");
}
