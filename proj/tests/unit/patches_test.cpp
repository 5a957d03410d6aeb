#include <gtest/gtest.h>

#include <set>

#include "hetprice/errors.hpp"
#include "hetprice/fixtures.hpp"
#include "hetprice/rum.hpp"

using namespace hetprice;
using namespace hetprice::rum;

namespace {

void expect_unit_mass(const PatchDecomposition& d, std::size_t t_count) {
  for (std::size_t t = 0; t < t_count; ++t) {
    Rational total(0);
    for (const auto& row : d.pi) total += row[t];
    EXPECT_EQ(total, Rational(1)) << "budget " << t;
  }
  std::set<std::vector<int>> distinct;
  for (const auto& p : d.patches) distinct.insert(p.signs);
  EXPECT_EQ(distinct.size(), d.patches.size());
}

}  // namespace

TEST(Patches, CrossingLinesGiveFive) {
  std::vector<Budget> b{{{1, 2}, 4}, {{2, 1}, 4}};
  auto d = compute_patches(b);
  ASSERT_EQ(d.patches.size(), 5u);
  expect_unit_mass(d, 2);
  // The intersection (4/3, 4/3) lies on both budgets.
  bool found = false;
  for (const auto& p : d.patches) {
    if (p.signs == std::vector<int>{0, 0}) {
      found = true;
      EXPECT_EQ(p.representative, (RationalVector{Rational(4, 3), Rational(4, 3)}));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Patches, ParallelLinesGiveTwo) {
  std::vector<Budget> b{{{1, 1}, 2}, {{1, 1}, 4}};
  auto d = compute_patches(b);
  ASSERT_EQ(d.patches.size(), 2u);
  expect_unit_mass(d, 2);
  EXPECT_EQ(d.patches[0].signs, (std::vector<int>{0, -1}));
  EXPECT_EQ(d.patches[1].signs, (std::vector<int>{1, 0}));
}

TEST(Patches, SingleBudgetGivesOne) {
  std::vector<Budget> b{{{1, 2, 3}, 6}};
  auto d = compute_patches(b);
  ASSERT_EQ(d.patches.size(), 1u);
  EXPECT_EQ(d.pi[0], RationalVector{1});
}

TEST(Patches, ThreeGoodsCrossingPlanes) {
  // Each plane separates the other simplex's vertices.
  std::vector<Budget> b{{{1, 1, 1}, 3}, {{2, 1, Rational(1, 2)}, Rational(7, 2)}};
  auto d = compute_patches(b);
  expect_unit_mass(d, 2);
  // Each simplex is cut by the other plane into two faces and their common edge.
  EXPECT_EQ(d.patches.size(), 5u);
  for (const auto& p : d.patches) {
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_EQ((dot(b[s].pbar, p.representative) - b[s].total).sign(), p.signs[s]);
    }
  }
}

TEST(Patches, PlanesMeetingOnAFace) {
  // 2x+y+z-3 = x on the first simplex, so the planes share only the face x = 0.
  std::vector<Budget> b{{{1, 1, 1}, 3}, {{2, 1, 1}, 3}};
  auto d = compute_patches(b);
  expect_unit_mass(d, 2);
  ASSERT_EQ(d.patches.size(), 3u);
  EXPECT_EQ(d.patches[0].signs, (std::vector<int>{-1, 0}));
  EXPECT_EQ(d.patches[1].signs, (std::vector<int>{0, 0}));
  EXPECT_EQ(d.patches[2].signs, (std::vector<int>{0, 1}));
}

TEST(Patches, Errors) {
  std::vector<Budget> same{{{1, 2}, 4}, {{2, 4}, 8}};
  EXPECT_THROW(compute_patches(same), DomainError);
  std::vector<Budget> wide{{{1, 1, 1, 1, 1}, 5}};
  EXPECT_THROW(compute_patches(wide), UnsupportedDimension);
  std::vector<Budget> zero{{{0, 1}, 1}};
  EXPECT_THROW(compute_patches(zero), NonPositivePrice);
}

TEST(Patches, PointModeUsesWeights) {
  auto cs = fixtures::crossing_positive();
  auto d = compute_patches(cs);
  expect_unit_mass(d, 2);
  // Each point is in exactly one patch and every patch holds a data point.
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t j = 0; j < 2; ++j) {
      auto x = cs.bundle(t, j);
      int hits = 0;
      for (const auto& p : d.patches) {
        bool match = true;
        for (std::size_t s = 0; s < 2; ++s) {
          match = match && (dot(cs.at(s).pbar, x.values()) - cs.at(s).total).sign() == p.signs[s];
        }
        hits += match ? 1 : 0;
      }
      EXPECT_EQ(hits, 1);
    }
  }
  EXPECT_EQ(d.patches.size(), 4u);
}
