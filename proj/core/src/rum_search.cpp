#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "hetprice/errors.hpp"
#include "hetprice/rum.hpp"

namespace hetprice::rum {

namespace {

enum class Consistency { garp, gapp };

// Pairwise relations between every pair of points, precomputed once so the
// search never touches rational arithmetic.
class StreamModel {
 public:
  StreamModel(const CrossSection& cs, Consistency mode)
      : cs_(cs), t_(cs.observations()), n_(cs.points_per_observation()) {
    std::vector<std::vector<Bundle>> x(t_);
    for (std::size_t t = 0; t < t_; ++t) {
      for (std::size_t j = 0; j < n_; ++j) x[t].push_back(cs.bundle(t, j));
    }
    weak_.assign(t_ * n_ * t_ * n_, false);
    strict_.assign(t_ * n_ * t_ * n_, false);
    for (std::size_t t = 0; t < t_; ++t) {
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t s = 0; s < t_; ++s) {
          for (std::size_t l = 0; l < n_; ++l) {
            Rational c = dot(cs.at(t).pbar, x[s][l].values());
            bool w = false, st = false;
            if (mode == Consistency::garp) {
              w = cs.at(t).total >= c;
              st = cs.at(t).total > c;
            } else {
              w = c <= cs.at(s).total;
              st = c < cs.at(s).total;
            }
            weak_[index(t, j, s, l)] = w;
            strict_[index(t, j, s, l)] = st;
          }
        }
      }
    }
  }

  std::size_t observations() const { return t_; }
  std::size_t points() const { return n_; }
  const CrossSection& cross_section() const { return cs_; }

  bool conflict(std::size_t t, std::size_t j, std::size_t s, std::size_t l) const {
    bool ab = weak_[index(t, j, s, l)], ba = weak_[index(s, l, t, j)];
    return ab && ba && (strict_[index(t, j, s, l)] || strict_[index(s, l, t, j)]);
  }

  // Relations of the stream picking point pick[t] at observation t.
  revpref::RevealedPreferenceGraph stream_graph(std::span<const std::size_t> pick) const {
    const std::size_t m = pick.size();
    std::vector<std::vector<bool>> w(m, std::vector<bool>(m)), s(m, std::vector<bool>(m));
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        w[a][b] = weak_[index(a, pick[a], b, pick[b])];
        s[a][b] = strict_[index(a, pick[a], b, pick[b])];
      }
    }
    return revpref::RevealedPreferenceGraph(std::move(w), std::move(s), {});
  }

  // Cycle test on the prefix, without building rational matrices.
  bool stream_consistent(std::span<const std::size_t> pick) const {
    const std::size_t m = pick.size();
    std::vector<std::uint8_t> reach(m * m, 0);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) reach[a * m + b] = (a == b || weak_[index(a, pick[a], b, pick[b])]) ? 1 : 0;
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t a = 0; a < m; ++a) {
        if (!reach[a * m + k]) continue;
        for (std::size_t b = 0; b < m; ++b) reach[a * m + b] |= reach[k * m + b];
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (reach[a * m + b] && strict_[index(b, pick[b], a, pick[a])]) return false;
      }
    }
    return true;
  }

 private:
  std::size_t index(std::size_t t, std::size_t j, std::size_t s, std::size_t l) const {
    return ((t * n_ + j) * t_ + s) * n_ + l;
  }

  const CrossSection& cs_;
  std::size_t t_, n_;
  std::vector<bool> weak_, strict_;
};

struct BranchResult {
  bool found = false;
  bool exhausted_budget = false;
  std::uint64_t nodes = 0;
  std::vector<std::vector<std::size_t>> assignment;
};

class Searcher {
 public:
  Searcher(const StreamModel& model, std::uint64_t budget, const std::atomic<std::size_t>* cancel_above,
           std::size_t branch)
      : m_(model), budget_(budget), cancel_above_(cancel_above), branch_(branch),
        t_(model.observations()), n_(model.points()),
        assign_(t_, std::vector<std::size_t>(n_, 0)), used_(t_, std::vector<bool>(n_, false)) {
    for (std::size_t i = 0; i < n_; ++i) {
      assign_[0][i] = i;
      used_[0][i] = true;
    }
  }

  // Explores sortings whose type 0 takes point `first` at observation 1.
  BranchResult run(std::size_t first) {
    BranchResult r;
    if (try_place(1, 0, first)) {
      if (dfs(1, 1)) {
        r.found = true;
        r.assignment = assign_;
      }
    }
    r.nodes = nodes_;
    r.exhausted_budget = aborted_;
    return r;
  }

 private:
  bool cancelled() const {
    return cancel_above_ != nullptr && cancel_above_->load(std::memory_order_relaxed) < branch_;
  }

  // Counts a node and checks whether point j may join type i at observation t.
  bool try_place(std::size_t t, std::size_t i, std::size_t j) {
    if (++nodes_ > budget_) {
      aborted_ = true;
      return false;
    }
    const auto& cs = m_.cross_section();
    if (cs.has_weights() && cs.weight(t, j) != cs.weight(0, assign_[0][i])) return false;
    for (std::size_t s = 0; s < t; ++s) {
      if (m_.conflict(s, assign_[s][i], t, j)) return false;
    }
    assign_[t][i] = j;
    if (t >= 2) {
      pick_.clear();
      for (std::size_t s = 0; s <= t; ++s) pick_.push_back(assign_[s][i]);
      if (!m_.stream_consistent(pick_)) return false;
    }
    used_[t][j] = true;
    return true;
  }

  // Continues after type i-1 at observation t has been placed.
  bool dfs(std::size_t t, std::size_t i) {
    if (aborted_ || cancelled()) return false;
    if (i == n_) {
      if (t + 1 == t_) return true;
      return dfs(t + 1, 0);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (used_[t][j]) continue;
      if (try_place(t, i, j)) {
        if (dfs(t, i + 1)) return true;
        used_[t][j] = false;
      }
      if (aborted_) return false;
    }
    return false;
  }

  const StreamModel& m_;
  std::uint64_t budget_;
  const std::atomic<std::size_t>* cancel_above_;
  std::size_t branch_;
  std::size_t t_, n_;
  std::vector<std::vector<std::size_t>> assign_;
  std::vector<std::vector<bool>> used_;
  std::vector<std::size_t> pick_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::optional<std::vector<RefutationEntry>> enumerate_refutation(const StreamModel& m,
                                                                 std::size_t cap) {
  const std::size_t t_count = m.observations(), n = m.points();
  if (n > 4) return std::nullopt;
  auto perms = all_permutations(n);
  double total = 1;
  for (std::size_t t = 1; t < t_count; ++t) total *= static_cast<double>(perms.size());
  if (total > static_cast<double>(cap)) return std::nullopt;

  const auto& cs = m.cross_section();
  std::vector<RefutationEntry> out;
  if (t_count < 2) return out;
  std::vector<std::size_t> odometer(t_count, 0);
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  while (true) {
    std::vector<std::vector<std::size_t>> a{identity};
    for (std::size_t t = 1; t < t_count; ++t) a.push_back(perms[odometer[t]]);
    bool admissible = true;
    if (cs.has_weights()) {
      for (std::size_t t = 1; t < t_count && admissible; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
          if (cs.weight(t, a[t][i]) != cs.weight(0, a[0][i])) admissible = false;
        }
      }
    }
    if (admissible) {
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> pick;
        for (std::size_t t = 0; t < t_count; ++t) pick.push_back(a[t][i]);
        auto g = m.stream_graph(pick);
        auto v = revpref::check_acyclic(g);
        if (!v.satisfied) {
          out.push_back(RefutationEntry{SortingFunction(a), i, *v.witness});
          break;
        }
      }
    }
    std::size_t pos = t_count - 1;
    while (true) {
      if (++odometer[pos] < perms.size()) break;
      odometer[pos] = 0;
      if (pos == 1) return out;
      --pos;
    }
  }
}

RumVerdict search(const CrossSection& cs, Consistency mode, const SearchOptions& options) {
  StreamModel model(cs, mode);
  const std::size_t t_count = cs.observations(), n = cs.points_per_observation();
  RumVerdict verdict;
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (t_count == 1) {
    verdict.status = Status::rationalizable;
    verdict.sorting = SortingFunction({identity});
    return verdict;
  }

  std::vector<BranchResult> results(n);
  std::uint64_t cumulative = 0;
  auto reduce = [&](std::size_t upto) -> bool {
    // Replays branches in order; true once the verdict is settled.
    for (std::size_t b = 0; b < upto; ++b) {
      const auto& r = results[b];
      if (r.exhausted_budget || cumulative + r.nodes > options.node_budget) {
        verdict.status = Status::unknown;
        verdict.explored_nodes = options.node_budget + 1;
        return true;
      }
      cumulative += r.nodes;
      if (r.found) {
        verdict.status = Status::rationalizable;
        verdict.sorting = SortingFunction(r.assignment);
        verdict.explored_nodes = cumulative;
        return true;
      }
    }
    return false;
  };

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    for (std::size_t b = 0; b < n; ++b) {
      Searcher s(model, options.node_budget - cumulative, nullptr, b);
      results[b] = s.run(b);
      if (results[b].exhausted_budget) {
        verdict.status = Status::unknown;
        verdict.explored_nodes = options.node_budget + 1;
        return verdict;
      }
      cumulative += results[b].nodes;
      if (results[b].found) {
        verdict.status = Status::rationalizable;
        verdict.sorting = SortingFunction(results[b].assignment);
        verdict.explored_nodes = cumulative;
        return verdict;
      }
    }
  } else {
    std::atomic<std::size_t> best_found{n};
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next.fetch_add(1); b < n; b = next.fetch_add(1)) {
          Searcher s(model, options.node_budget, &best_found, b);
          results[b] = s.run(b);
          if (results[b].found) {
            std::size_t cur = best_found.load();
            while (b < cur && !best_found.compare_exchange_weak(cur, b)) {
            }
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    cumulative = 0;
    if (reduce(n)) return verdict;
  }

  verdict.status = Status::not_rationalizable;
  verdict.explored_nodes = cumulative;
  verdict.refutation = enumerate_refutation(model, options.certificate_cap);
  return verdict;
}

RationalVector type_weights(const CrossSection& cs, const SortingFunction& sigma) {
  RationalVector w;
  for (std::size_t i = 0; i < cs.points_per_observation(); ++i) w.push_back(cs.weight(0, sigma(0, i)));
  return w;
}

aggregators::AggregatorSpec weighted_version(const aggregators::AggregatorSpec& w, const RationalVector& weights,
                                             bool has_weights) {
  if (has_weights && w.kind() == aggregators::Kind::arithmetic) {
    return aggregators::AggregatorSpec::weighted_arithmetic(weights);
  }
  return w;
}

RpmCertificate stable_certificate(const CrossSection& cs, const SortingFunction& sigma,
                                  std::vector<std::size_t> goods, const aggregators::AggregatorSpec& w) {
  PanelDataset panel = sorted_panel(cs, sigma);
  RationalVector weights = type_weights(cs, sigma);
  auto agg = weighted_version(w, weights, cs.has_weights());
  auto r = constructions::prop4_stable_prices(panel, std::move(goods), agg);
  auto pooled_obs = revpref::pooled_observations(panel, r.prices);
  RpmCertificate cert{r.scale, weights, dot(weights, r.scale.lambda), revpref::afriat_construct(pooled_obs),
                      r.pooled};
  return cert;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::rationalizable: return "rationalizable";
    case Status::not_rationalizable: return "not_rationalizable";
    case Status::unknown: return "unknown";
  }
  return "unknown";
}

RumVerdict rum_check(const CrossSection& cs, const SearchOptions& options) {
  return search(cs, Consistency::garp, options);
}

std::pair<RumVerdict, std::optional<RpmCertificate>> rpm_check(const CrossSection& cs,
                                                               std::vector<std::size_t> goods,
                                                               const aggregators::AggregatorSpec& w,
                                                               const SearchOptions& options) {
  RumVerdict v = rum_check(cs, options);
  if (v.status != Status::rationalizable) return {std::move(v), std::nullopt};
  RpmCertificate cert = stable_certificate(cs, *v.sorting, std::move(goods), w);
  return {std::move(v), std::move(cert)};
}

std::pair<RumVerdict, std::optional<RpmCertificate>> au_rum_check(
    const CrossSection& cs, const behavioral::BehavioralExpenditure& phi,
    const aggregators::AggregatorSpec& w, const SearchOptions& options) {
  RumVerdict v = search(cs, Consistency::gapp, options);
  if (v.status != Status::rationalizable) return {std::move(v), std::nullopt};
  PanelDataset panel = sorted_panel(cs, *v.sorting);
  RationalVector weights = type_weights(cs, *v.sorting);
  auto r = constructions::prop6_au_lambdas(panel, phi, weighted_version(w, weights, cs.has_weights()));
  RpmCertificate cert{r.scale, weights, dot(weights, r.scale.lambda), std::nullopt, r.pooled_gapp};
  return {std::move(v), std::move(cert)};
}

RpmCertificate rpm_from_rum_discrete(const CrossSection& cs, std::vector<std::size_t> goods,
                                     const aggregators::AggregatorSpec& w, const SearchOptions& options) {
  RumVerdict v = rum_check(cs, options);
  if (v.status == Status::unknown) throw SearchBudgetExceeded("sorting search exceeded its node budget");
  if (v.status == Status::not_rationalizable) {
    throw NotRumRationalizable("no sorting makes every type's stream satisfy GARP");
  }
  return stable_certificate(cs, *v.sorting, std::move(goods), w);
}

}  // namespace hetprice::rum
