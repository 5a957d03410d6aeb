#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetprice/aggregators.hpp"
#include "hetprice/behavioral.hpp"
#include "hetprice/constructions.hpp"
#include "hetprice/dataset.hpp"
#include "hetprice/revpref.hpp"

// Random-utility tests on repeated cross-sections: search for a sorting of
// points into types whose streams are individually consistent.
namespace hetprice::rum {

enum class Status { rationalizable, not_rationalizable, unknown };

const char* to_string(Status s);

// One complete sorting and the type whose stream fails, with its cycle.
struct RefutationEntry {
  SortingFunction sorting;
  std::size_t type = 0;
  std::vector<std::size_t> witness;  // observation indices along the cycle
};

struct RumVerdict {
  Status status = Status::unknown;
  std::optional<SortingFunction> sorting;
  // Every sorting with its failing type, when small enough to enumerate.
  std::optional<std::vector<RefutationEntry>> refutation;
  std::uint64_t explored_nodes = 0;
};

struct SearchOptions {
  std::uint64_t node_budget = 100'000'000;
  unsigned threads = 1;
  // Largest number of sortings listed in a refutation certificate.
  std::size_t certificate_cap = 10'000;
};

// Streams must satisfy GARP at pbar. The first observation is sorted by the
// identity; among consistent sortings the lexicographically smallest is
// returned. Output does not depend on options.threads.
RumVerdict rum_check(const CrossSection& cs, const SearchOptions& options = {});

struct RpmCertificate {
  constructions::StableScale scales;
  RationalVector weights;  // weight of each type
  Rational weighted_scale_sum;  // sum_i w_i lambda_i
  std::optional<revpref::AfriatSolution> utility;
  revpref::GarpVerdict pooled;
};

// RUM test followed by stable scales on goods R for the sorted panel.
std::pair<RumVerdict, std::optional<RpmCertificate>> rpm_check(const CrossSection& cs,
                                                               std::vector<std::size_t> goods,
                                                               const aggregators::AggregatorSpec& w,
                                                               const SearchOptions& options = {});

// Streams must satisfy GAPP with linear systems; on success the sorted panel
// is passed to the behavioral scale construction.
std::pair<RumVerdict, std::optional<RpmCertificate>> au_rum_check(
    const CrossSection& cs, const behavioral::BehavioralExpenditure& phi,
    const aggregators::AggregatorSpec& w, const SearchOptions& options = {});

// Types weighted by their point weights (uniform when absent). With the
// arithmetic aggregator the scales satisfy sum_i w_i lambda_i = 1. Throws
// NotRumRationalizable or SearchBudgetExceeded when no sorting is found.
RpmCertificate rpm_from_rum_discrete(const CrossSection& cs, std::vector<std::size_t> goods,
                                     const aggregators::AggregatorSpec& w,
                                     const SearchOptions& options = {});

struct Budget {
  RationalVector pbar;
  Rational total;
};

// Region of the union of budget hyperplanes on which the sign of
// pbar^s.x - m^s is constant for every s.
struct Patch {
  std::vector<int> signs;                 // -1, 0, +1 per budget
  std::vector<std::size_t> on_budgets;    // budgets with a zero sign
  RationalVector representative;          // quantities
};

struct PatchDecomposition {
  std::vector<Patch> patches;
  // pi[l][t]: mass of budget t on patch l; zero when patch l is not on B_t.
  std::vector<RationalVector> pi;
};

// Geometric enumeration of realized sign vectors, K <= 4. Without data each
// budget spreads its mass uniformly over its patches.
PatchDecomposition compute_patches(std::span<const Budget> budgets);
// Patches realized by the data points, with masses from point weights.
PatchDecomposition compute_patches(const CrossSection& cs);

enum class OneGoodOutcome { refuted, not_refuted, unknown };
const char* to_string(OneGoodOutcome o);

// For one agent and observations t < t2: the ratio r = p^{t2}_g / p^{t}_g
// gives mutual strict preference iff band_lo < r < band_hi (absent bounds are
// 0 and infinity), and the agent's ratio lies in (ratio_lo, ratio_hi)
// whenever it pays at least pbar at both observations.
struct ForcedPair {
  std::size_t agent = 0;
  std::size_t t = 0;
  std::size_t t2 = 0;
  std::optional<Rational> band_lo, band_hi;
  Rational ratio_lo, ratio_hi;
};

struct OneGoodResult {
  OneGoodOutcome outcome = OneGoodOutcome::unknown;
  // Observations on which every pair is forced for every agent.
  std::vector<std::size_t> triple;
  std::vector<ForcedPair> pairs;
  std::uint64_t explored_nodes = 0;
  // "interval" for the exact pigeonhole argument, "grid" for the fallback.
  std::string method;
  std::vector<std::string> trace;
  // Consistent prices for the heterogeneous good when one was found, [i][t].
  std::optional<std::vector<RationalVector>> consistent_prices;
};

// Can heterogeneity in the price of `good` alone rationalize the panel under
// W? Supports two consumers.
OneGoodResult check_one_good_refutation(const PanelDataset& panel, std::size_t good,
                                        const aggregators::AggregatorSpec& w,
                                        std::uint64_t node_budget = 10'000'000);

}  // namespace hetprice::rum
