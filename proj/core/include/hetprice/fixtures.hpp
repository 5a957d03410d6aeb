#pragma once

#include <vector>

#include "hetprice/dataset.hpp"
#include "hetprice/revpref.hpp"

// Small hand-checkable datasets shared by tests, benchmarks and the CLI.
namespace hetprice::fixtures {

// Two agents with identical expenditures, four goods, four observations.
// Expenditure 10 on good t at observation t and 1 elsewhere; pbar^t has 2 on
// good t and 1 elsewhere.
PanelDataset four_good_example();

// Two observations on goods with prices (1,2) and (2,1) and bundles
// (1,3/2), (3/2,1): each bundle is strictly cheaper at the other's prices.
std::vector<revpref::Observation> warp_pair();
// The same pair as a one-consumer panel.
PanelDataset warp_panel();

// Two crossing budgets on two goods, pbar (1,2) and (2,1), both with m = 4.
// In the negative instance every point at the first budget is (1,3) and at
// the second (3,1), so every sorting contains the WARP pair.
CrossSection crossing_negative();
// Points {(1,3),(4,0)} and {(3,1),(0,4)}: sorting (1,3) with (0,4) works.
CrossSection crossing_positive();

}  // namespace hetprice::fixtures
