#include "hetprice/fixtures.hpp"

namespace hetprice::fixtures {

PanelDataset four_good_example() {
  constexpr std::size_t n = 2, t_count = 4, k = 4;
  RationalVector e, pbar;
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t j = 0; j < k; ++j) pbar.push_back(j == t ? 2 : 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t j = 0; j < k; ++j) e.push_back(j == t ? 10 : 1);
    }
  }
  return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
}

std::vector<revpref::Observation> warp_pair() {
  return {
      {Bundle({Rational(1), Rational(3, 2)}), {Rational(1), Rational(2)}},
      {Bundle({Rational(3, 2), Rational(1)}), {Rational(2), Rational(1)}},
  };
}

PanelDataset warp_panel() {
  return PanelDataset(1, 2, 2, {1, 3, 3, 1}, {1, 2, 2, 1});
}

namespace {

CrossSection crossing(std::vector<RationalVector> first, std::vector<RationalVector> second) {
  std::vector<CrossSectionObservation> obs;
  obs.push_back({{1, 2}, 4, std::move(first), std::nullopt});
  obs.push_back({{2, 1}, 4, std::move(second), std::nullopt});
  return CrossSection(2, std::move(obs));
}

}  // namespace

CrossSection crossing_negative() { return crossing({{1, 3}, {1, 3}}, {{3, 1}, {3, 1}}); }

CrossSection crossing_positive() { return crossing({{1, 3}, {4, 0}}, {{3, 1}, {0, 4}}); }

}  // namespace hetprice::fixtures
