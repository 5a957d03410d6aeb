#include <algorithm>
#include <string>

#include "hetprice/errors.hpp"
#include "hetprice/rum.hpp"

namespace hetprice::rum {

namespace {

using aggregators::AggregatorSpec;
using aggregators::Kind;

std::string obs_label(std::size_t t) { return std::to_string(t + 1); }

// Cost at prices pbar^t of the goods other than g in bundle x(e^{s}, pbar^s).
Rational other_goods_cost(const PanelDataset& panel, std::size_t i, std::size_t t, std::size_t s,
                          std::size_t g) {
  Rational c(0);
  auto e = panel.expenditure(i, s);
  for (std::size_t k = 0; k < panel.goods(); ++k) {
    if (k != g) c += panel.pbar(t)[k] * e[k] / panel.pbar(s)[k];
  }
  return c;
}

struct Band {
  bool empty = false;
  std::optional<Rational> lo, hi;  // open bounds on r
};

// Mutual strict preference between observations t < t2 of agent i as a
// condition on r = p^{i,t2}_g / p^{i,t}_g.
Band mutual_strict_band(const PanelDataset& panel, std::size_t i, std::size_t t, std::size_t t2,
                        std::size_t g) {
  Band b;
  // x^t strictly preferred to x^{t2}: e^{t2}_g / r + C < m^t.
  Rational room = panel.total(i, t) - other_goods_cost(panel, i, t, t2, g);
  const Rational& e2 = panel.expenditure(i, t2)[g];
  if (e2.is_zero()) {
    b.empty = !room.is_positive();
  } else if (!room.is_positive()) {
    b.empty = true;
  } else {
    b.lo = e2 / room;
  }
  // x^{t2} strictly preferred to x^t: r e^t_g + C' < m^{t2}.
  Rational room2 = panel.total(i, t2) - other_goods_cost(panel, i, t2, t, g);
  const Rational& e1 = panel.expenditure(i, t)[g];
  if (e1.is_zero()) {
    b.empty = b.empty || !room2.is_positive();
  } else if (!room2.is_positive()) {
    b.empty = true;
  } else {
    b.hi = room2 / e1;
  }
  if (b.lo && b.hi && *b.lo >= *b.hi) b.empty = true;
  return b;
}

std::string bound_text(const std::optional<Rational>& v, const char* fallback) {
  return v ? v->to_string() : fallback;
}

bool interval_mode(const PanelDataset& panel, std::size_t g, const AggregatorSpec& w,
                   OneGoodResult& out) {
  const std::size_t t_count = panel.observations();
  RationalVector share(2, Rational(1, 2));
  if (w.kind() == Kind::weighted_arithmetic) share = w.weights();

  // forced[i][t][t2] with its record.
  std::vector<std::vector<std::vector<std::optional<ForcedPair>>>> forced(
      2, std::vector<std::vector<std::optional<ForcedPair>>>(
             t_count, std::vector<std::optional<ForcedPair>>(t_count)));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t t2 = t + 1; t2 < t_count; ++t2) {
        Band b = mutual_strict_band(panel, i, t, t2, g);
        if (b.empty) continue;
        // Paying at least pbar at both observations: p in [pbar, pbar / w_i).
        Rational lo = share[i] * panel.pbar(t2)[g] / panel.pbar(t)[g];
        Rational hi = panel.pbar(t2)[g] / (share[i] * panel.pbar(t)[g]);
        if ((b.lo && *b.lo > lo) || (b.hi && *b.hi < hi)) continue;
        forced[i][t][t2] = ForcedPair{i, t, t2, b.lo, b.hi, lo, hi};
      }
    }
  }
  auto both = [&](std::size_t a, std::size_t b) {
    return forced[0][a][b].has_value() && forced[1][a][b].has_value();
  };
  for (std::size_t a = 0; a < t_count; ++a) {
    for (std::size_t b = a + 1; b < t_count; ++b) {
      if (!both(a, b)) continue;
      for (std::size_t c = b + 1; c < t_count; ++c) {
        if (!both(a, c) || !both(b, c)) continue;
        out.outcome = OneGoodOutcome::refuted;
        out.method = "interval";
        out.triple = {a, b, c};
        out.trace.push_back("price of good " + obs_label(g) +
                            " aggregates to pbar at every observation, so at each observation "
                            "some agent pays at least pbar");
        for (auto [s, u] : {std::pair{a, b}, std::pair{a, c}, std::pair{b, c}}) {
          for (std::size_t i = 0; i < 2; ++i) {
            const ForcedPair& f = *forced[i][s][u];
            out.pairs.push_back(f);
            out.trace.push_back("agent " + obs_label(i) + ", observations " + obs_label(s) + " and " +
                                obs_label(u) + ": mutual strict preference iff " +
                                bound_text(f.band_lo, "0") + " < p^" + obs_label(u) + "/p^" +
                                obs_label(s) + " < " + bound_text(f.band_hi, "inf") +
                                "; paying at least pbar at both puts the ratio in (" +
                                f.ratio_lo.to_string() + ", " + f.ratio_hi.to_string() + ")");
          }
        }
        out.trace.push_back("among observations " + obs_label(a) + ", " + obs_label(b) + ", " +
                            obs_label(c) +
                            " one agent pays at least pbar twice, which forces a two-cycle in "
                            "that agent's data");
        return true;
      }
    }
  }
  return false;
}

// Depth-first search over a 2^-10 grid of agent-1 prices, agent 2 solved
// from W. Nodes are observations; pooled GARP is checked on every prefix.
class GridSearch {
 public:
  GridSearch(const PanelDataset& panel, std::size_t g, const AggregatorSpec& w,
             std::uint64_t budget)
      : panel_(panel), g_(g), w_(w), budget_(budget), t_count_(panel.observations()),
        n_(2 * t_count_), q_(n_), weak_(n_, std::vector<char>(n_, 0)),
        strict_(n_, std::vector<char>(n_, 0)) {
    // C[t][j*T+s]: other-goods cost of bundle (j,s) at pbar^t.
    other_.assign(t_count_, RationalVector(n_));
    for (std::size_t t = 0; t < t_count_; ++t) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t s = 0; s < t_count_; ++s) other_[t][j * t_count_ + s] = other_goods_cost(panel, j, t, s, g);
      }
    }
    // Center-out order of grid steps k / 512 of pbar.
    order_.push_back(512);
    for (int d = 1; d < 512; ++d) {
      order_.push_back(512 - d);
      order_.push_back(512 + d);
    }
  }

  OneGoodOutcome run() {
    if (place(0)) return OneGoodOutcome::not_refuted;
    return aborted_ ? OneGoodOutcome::unknown : OneGoodOutcome::refuted;
  }
  std::uint64_t nodes() const { return nodes_; }
  std::vector<RationalVector> prices() const {
    std::vector<RationalVector> out(2, RationalVector(t_count_));
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t t = 0; t < t_count_; ++t) out[i][t] = q_[i * t_count_ + t];
    }
    return out;
  }

 private:
  std::size_t node(std::size_t i, std::size_t t) const { return i * t_count_ + t; }

  // Cost of bundle b at the prices of node a, minus a's own expenditure.
  Rational slack(std::size_t a, std::size_t b) const {
    std::size_t ta = a % t_count_, tb = b % t_count_, jb = b / t_count_, ia = a / t_count_;
    Rational cost = q_[a] * panel_.expenditure(jb, tb)[g_] / q_[b] + other_[ta][b];
    return panel_.total(ia, ta) - cost;
  }

  bool prefix_consistent(std::size_t upto) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t t = 0; t <= upto; ++t) live.push_back(node(i, t));
    }
    for (std::size_t a : live) {
      for (std::size_t b : live) {
        if (a % t_count_ != upto && b % t_count_ != upto) continue;
        int s = slack(a, b).sign();
        weak_[a][b] = s >= 0;
        strict_[a][b] = s > 0;
      }
    }
    std::vector<std::vector<char>> reach(n_, std::vector<char>(n_, 0));
    for (std::size_t a : live) {
      for (std::size_t b : live) reach[a][b] = weak_[a][b];
    }
    for (std::size_t m : live) {
      for (std::size_t a : live) {
        if (!reach[a][m]) continue;
        for (std::size_t b : live) {
          if (reach[m][b]) reach[a][b] = 1;
        }
      }
    }
    for (std::size_t a : live) {
      for (std::size_t b : live) {
        if (reach[a][b] && strict_[b][a]) return false;
      }
    }
    return true;
  }

  bool place(std::size_t t) {
    if (t == t_count_) return true;
    const Rational& pbar = panel_.pbar(t)[g_];
    for (int k : order_) {
      if (++nodes_ > budget_) {
        aborted_ = true;
        return false;
      }
      Rational p1 = pbar * Rational(k, 512);
      Rational p2;
      try {
        RationalVector fixed{p1};
        p2 = aggregators::solve_residual(w_, pbar, fixed, 1);
      } catch (const NoBracket&) {
        continue;
      }
      q_[node(0, t)] = p1;
      q_[node(1, t)] = p2;
      if (prefix_consistent(t) && place(t + 1)) return true;
      if (aborted_) return false;
    }
    return false;
  }

  const PanelDataset& panel_;
  std::size_t g_;
  const AggregatorSpec& w_;
  std::uint64_t budget_;
  std::size_t t_count_, n_;
  RationalVector q_;
  std::vector<std::vector<char>> weak_, strict_;
  std::vector<RationalVector> other_;
  std::vector<int> order_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

const char* to_string(OneGoodOutcome o) {
  switch (o) {
    case OneGoodOutcome::refuted: return "refuted";
    case OneGoodOutcome::not_refuted: return "not_refuted";
    case OneGoodOutcome::unknown: return "unknown";
  }
  return "unknown";
}

OneGoodResult check_one_good_refutation(const PanelDataset& panel, std::size_t good,
                                        const aggregators::AggregatorSpec& w,
                                        std::uint64_t node_budget) {
  if (good >= panel.goods()) throw DomainError("good index out of range");
  OneGoodResult out;
  if (panel.consumers() != 2) {
    out.method = "none";
    out.trace.push_back("one-good refutation supports exactly two consumers");
    return out;
  }
  const bool arithmetic_kind = w.kind() == Kind::arithmetic || w.kind() == Kind::weighted_arithmetic;
  if (arithmetic_kind && interval_mode(panel, good, w, out)) return out;

  GridSearch grid(panel, good, w, node_budget);
  out.outcome = grid.run();
  out.method = "grid";
  out.explored_nodes = grid.nodes();
  switch (out.outcome) {
    case OneGoodOutcome::not_refuted:
      out.consistent_prices = grid.prices();
      out.trace.push_back("found prices for good " + obs_label(good) +
                          " on the 2^-10 grid under which the pooled data satisfy GARP");
      break;
    case OneGoodOutcome::refuted:
      out.trace.push_back("every assignment on the 2^-10 grid violates pooled GARP");
      break;
    case OneGoodOutcome::unknown:
      out.trace.push_back("grid search exceeded its node budget");
      break;
  }
  return out;
}

}  // namespace hetprice::rum
