#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hetprice/errors.hpp"
#include "hetprice/fixtures.hpp"
#include "hetprice/rum.hpp"
#include "oracles.hpp"

using namespace hetprice;
using namespace hetprice::rum;

namespace {

// Random cross-section on a common budget per observation. Every point
// spends at least 1 on each good, so any subset R is admissible.
CrossSection random_cross_section(std::uint64_t seed, std::size_t n, std::size_t t_count, std::size_t k) {
  std::mt19937_64 gen(seed);
  // Sharp relative prices and lopsided points make refutations common.
  const Rational prices[] = {Rational(1, 4), Rational(1), Rational(4)};
  std::vector<CrossSectionObservation> obs;
  for (std::size_t t = 0; t < t_count; ++t) {
    CrossSectionObservation o;
    for (std::size_t j = 0; j < k; ++j) o.pbar.push_back(prices[gen() % 3]);
    o.total = Rational(static_cast<long>(4 * k));
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector e(k, Rational(1));
      std::size_t heavy = gen() % k;
      e[heavy] += Rational(static_cast<long>(3 * k));
      o.points.push_back(std::move(e));
    }
    obs.push_back(std::move(o));
  }
  return CrossSection(k, std::move(obs));
}

CrossSection shuffled(const CrossSection& cs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<CrossSectionObservation> obs;
  for (std::size_t t = 0; t < cs.observations(); ++t) {
    auto o = cs.at(t);
    std::shuffle(o.points.begin(), o.points.end(), gen);
    obs.push_back(std::move(o));
  }
  return CrossSection(cs.goods(), std::move(obs));
}

bool sorting_replays(const CrossSection& cs, const SortingFunction& sigma) {
  auto panel = sorted_panel(cs, sigma);
  for (std::size_t i = 0; i < panel.consumers(); ++i) {
    if (!oracle::garp_by_chains(revpref::observations_at_pbar(panel, i))) return false;
  }
  return true;
}

std::vector<revpref::Observation> pooled_at_scales(const CrossSection& cs, const RumVerdict& v,
                                                   const RpmCertificate& cert) {
  auto panel = sorted_panel(cs, *v.sorting);
  auto prices = HeterogeneousPrices::stable(panel, cert.scales.matrix(cs.goods()));
  return revpref::pooled_observations(panel, prices);
}

}  // namespace

TEST(Rum, NegativeInstanceHasTwoFailingMatchings) {
  auto cs = fixtures::crossing_negative();
  auto v = rum_check(cs);
  EXPECT_EQ(v.status, Status::not_rationalizable);
  EXPECT_FALSE(v.sorting);
  ASSERT_TRUE(v.refutation);
  ASSERT_EQ(v.refutation->size(), 2u);
  for (const auto& entry : *v.refutation) {
    auto panel = sorted_panel(cs, entry.sorting);
    auto obs = revpref::observations_at_pbar(panel, entry.type);
    EXPECT_TRUE(revpref::witness_replays(revpref::direct_relations(obs), entry.witness));
    EXPECT_FALSE(oracle::garp_by_chains(obs));
  }
  EXPECT_FALSE(oracle::rum_by_enumeration(cs));
}

TEST(Rum, PositiveInstanceUsesTheCrossMatching) {
  auto cs = fixtures::crossing_positive();
  auto v = rum_check(cs);
  ASSERT_EQ(v.status, Status::rationalizable);
  ASSERT_TRUE(v.sorting);
  EXPECT_TRUE(sorting_replays(cs, *v.sorting));
  // (1,3) goes with (0,4), the second point of the second observation.
  EXPECT_EQ(v.sorting->assignment(), (std::vector<std::vector<std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(Rum, SingleObservationIsAlwaysRationalizable) {
  auto cs = random_cross_section(3, 4, 1, 3);
  auto v = rum_check(cs);
  ASSERT_EQ(v.status, Status::rationalizable);
  EXPECT_EQ(v.sorting->assignment(), (std::vector<std::vector<std::size_t>>{{0, 1, 2, 3}}));
}

TEST(Rum, AgreesWithEnumeration) {
  int negatives = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto cs = random_cross_section(seed, 1 + seed % 3, 2 + seed % 2, 2);
    auto v = rum_check(cs);
    bool expected = oracle::rum_by_enumeration(cs);
    EXPECT_EQ(v.status == Status::rationalizable, expected) << seed;
    if (v.sorting) EXPECT_TRUE(sorting_replays(cs, *v.sorting));
    negatives += expected ? 0 : 1;
  }
  // The sample must exercise both verdicts.
  EXPECT_GT(negatives, 0);
}

TEST(Rum, VerdictIgnoresPointOrder) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto cs = random_cross_section(seed, 3, 3, 2);
    auto base = rum_check(cs).status;
    for (std::uint64_t s = 1; s <= 3; ++s) EXPECT_EQ(rum_check(shuffled(cs, seed * 7 + s)).status, base);
  }
}

TEST(Rum, ThreadCountDoesNotChangeTheAnswer) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cs = random_cross_section(seed, 4, 3, 3);
    SearchOptions one, many;
    many.threads = 4;
    auto a = rum_check(cs, one);
    auto b = rum_check(cs, many);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.sorting, b.sorting);
  }
}

TEST(Rum, TinyBudgetGivesUnknown) {
  auto cs = random_cross_section(11, 4, 4, 3);
  SearchOptions opt;
  opt.node_budget = 1;
  EXPECT_EQ(rum_check(cs, opt).status, Status::unknown);
}

TEST(Rum, ExtraPointsKeepARefutation) {
  auto base = fixtures::crossing_negative();
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CrossSectionObservation> obs{base.at(0), base.at(1)};
    // Any extra point pair on the same budgets.
    long a = static_cast<long>(gen() % 5), b = static_cast<long>(gen() % 5);
    obs[0].points.push_back({Rational(a), Rational(4 - a)});
    obs[1].points.push_back({Rational(b), Rational(4 - b)});
    CrossSection cs(2, std::move(obs));
    EXPECT_EQ(rum_check(cs).status, Status::not_rationalizable);
  }
}

TEST(Rpm, PositiveInstanceCertificate) {
  auto cs = fixtures::crossing_positive();
  auto [v, cert] = rpm_check(cs, {0, 1}, aggregators::AggregatorSpec::arithmetic());
  ASSERT_EQ(v.status, Status::rationalizable);
  ASSERT_TRUE(cert);
  EXPECT_EQ(sum(cert->scales.lambda) / Rational(2), Rational(1));
  EXPECT_EQ(cert->weights, (RationalVector{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(cert->weighted_scale_sum, Rational(1));
  auto obs = pooled_at_scales(cs, v, *cert);
  EXPECT_TRUE(oracle::garp_by_chains(obs));
  ASSERT_TRUE(cert->utility);
  EXPECT_TRUE(oracle::afriat_ok(*cert->utility, obs));
}

TEST(Rpm, NegativeInstanceHasNoCertificate) {
  auto [v, cert] = rpm_check(fixtures::crossing_negative(), {0, 1}, aggregators::AggregatorSpec::arithmetic());
  EXPECT_EQ(v.status, Status::not_rationalizable);
  EXPECT_FALSE(cert);
}

TEST(Rpm, SingleTypeHasUnitScale) {
  auto cs = random_cross_section(2, 1, 3, 2);
  auto [v, cert] = rpm_check(cs, {0}, aggregators::AggregatorSpec::arithmetic());
  if (v.status == Status::rationalizable) {
    ASSERT_TRUE(cert);
    EXPECT_EQ(cert->scales.lambda, RationalVector{1});
    EXPECT_EQ(cert->weights, RationalVector{1});
  }
}

TEST(Rpm, EquivalenceWithRum) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto cs = random_cross_section(seed, 2 + seed % 2, 3, 2);
    auto rum = rum_check(cs);
    auto [v, cert] = rpm_check(cs, {0, 1}, aggregators::AggregatorSpec::arithmetic());
    EXPECT_EQ(v.status, rum.status);
    if (rum.status == Status::rationalizable) {
      ASSERT_TRUE(cert) << seed;
      EXPECT_TRUE(oracle::garp_by_chains(pooled_at_scales(cs, v, *cert))) << seed;
    } else {
      EXPECT_FALSE(cert);
    }
  }
}

TEST(Rpm, DiscreteCertificate) {
  auto cert = rpm_from_rum_discrete(fixtures::crossing_positive(), {0, 1}, aggregators::AggregatorSpec::arithmetic());
  EXPECT_EQ(cert.weights, (RationalVector{Rational(1, 2), Rational(1, 2)}));
  Rational s(0);
  for (std::size_t i = 0; i < 2; ++i) s += cert.weights[i] * cert.scales.lambda[i];
  EXPECT_EQ(s, Rational(1));
  EXPECT_THROW(rpm_from_rum_discrete(fixtures::crossing_negative(), {0, 1}, aggregators::AggregatorSpec::arithmetic()),
               NotRumRationalizable);
}

TEST(Rpm, DiscreteCertificateUsesPointWeights) {
  auto base = fixtures::crossing_positive();
  std::vector<CrossSectionObservation> obs{base.at(0), base.at(1)};
  obs[0].weights = RationalVector{Rational(1, 4), Rational(3, 4)};
  obs[1].weights = RationalVector{Rational(3, 4), Rational(1, 4)};
  CrossSection cs(2, std::move(obs));
  auto cert = rpm_from_rum_discrete(cs, {0, 1}, aggregators::AggregatorSpec::arithmetic());
  Rational s(0), w(0);
  for (std::size_t i = 0; i < 2; ++i) {
    s += cert.weights[i] * cert.scales.lambda[i];
    w += cert.weights[i];
  }
  EXPECT_EQ(w, Rational(1));
  EXPECT_EQ(s, Rational(1));
}

TEST(AuRum, MisperceptionPositiveAndNegative) {
  auto phi = behavioral::BehavioralExpenditure::misperception();
  auto [v, cert] = au_rum_check(fixtures::crossing_positive(), phi, aggregators::AggregatorSpec::arithmetic());
  EXPECT_EQ(v.status, Status::rationalizable);
  EXPECT_TRUE(cert);
  auto [v2, cert2] = au_rum_check(fixtures::crossing_negative(), phi, aggregators::AggregatorSpec::arithmetic());
  EXPECT_EQ(v2.status, Status::not_rationalizable);
  EXPECT_FALSE(cert2);
}

TEST(AuRum, SingleObservation) {
  auto cs = random_cross_section(8, 3, 1, 2);
  auto [v, cert] = au_rum_check(cs, behavioral::from_key("reference:max1"), aggregators::AggregatorSpec::arithmetic());
  EXPECT_EQ(v.status, Status::rationalizable);
}
