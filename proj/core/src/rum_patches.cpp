#include <algorithm>
#include <map>
#include <set>

#include "hetprice/errors.hpp"
#include "hetprice/rum.hpp"

namespace hetprice::rum {

namespace {

using Signs = std::vector<int>;

Signs sign_vector(std::span<const Budget> budgets, std::span<const Rational> x) {
  Signs s;
  for (const auto& b : budgets) s.push_back((dot(b.pbar, x) - b.total).sign());
  return s;
}

// Solves A x = rhs exactly; nullopt when A is singular.
std::optional<RationalVector> solve_linear(std::vector<RationalVector> a, RationalVector rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  RationalVector x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = rhs[r] / a[r][r];
  return x;
}

// Vertices of the arrangement cut on the simplex of budget t by the other
// budget hyperplanes.
std::vector<RationalVector> arrangement_vertices(std::span<const Budget> budgets, std::size_t t,
                                                 std::size_t k) {
  // Constraint rows: coordinate planes first, then other budgets.
  std::vector<std::pair<RationalVector, Rational>> planes;
  for (std::size_t j = 0; j < k; ++j) {
    RationalVector row(k, Rational(0));
    row[j] = 1;
    planes.emplace_back(std::move(row), Rational(0));
  }
  for (std::size_t s = 0; s < budgets.size(); ++s) {
    if (s != t) planes.emplace_back(budgets[s].pbar, budgets[s].total);
  }
  std::vector<RationalVector> out;
  const std::size_t choose = k - 1;
  std::vector<std::size_t> idx(choose);
  for (std::size_t j = 0; j < choose; ++j) idx[j] = j;
  if (choose > planes.size()) return out;
  while (true) {
    std::vector<RationalVector> a{budgets[t].pbar};
    RationalVector rhs{budgets[t].total};
    for (std::size_t j : idx) {
      a.push_back(planes[j].first);
      rhs.push_back(planes[j].second);
    }
    if (auto x = solve_linear(std::move(a), std::move(rhs))) {
      bool nonneg = std::all_of(x->begin(), x->end(), [](const Rational& v) { return v.sign() >= 0; });
      if (nonneg && std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(std::move(*x));
    }
    // Next combination of `choose` rows.
    std::size_t pos = choose;
    while (pos > 0 && idx[pos - 1] == planes.size() - choose + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < choose; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

bool compatible(const Signs& a, const Signs& b) {
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] * b[s] < 0) return false;
  }
  return true;
}

Signs join(const Signs& a, const Signs& b) {
  Signs out(a.size());
  for (std::size_t s = 0; s < a.size(); ++s) out[s] = a[s] != 0 ? a[s] : b[s];
  return out;
}

bool conforms(const Signs& vertex, const Signs& cell) {
  for (std::size_t s = 0; s < cell.size(); ++s) {
    if (vertex[s] != 0 && vertex[s] != cell[s]) return false;
  }
  return true;
}

PatchDecomposition finish(std::map<Signs, std::pair<RationalVector, RationalVector>> cells,
                          std::size_t t_count) {
  PatchDecomposition out;
  for (auto& [signs, rep_pi] : cells) {
    Patch p;
    p.signs = signs;
    for (std::size_t s = 0; s < t_count; ++s) {
      if (signs[s] == 0) p.on_budgets.push_back(s);
    }
    p.representative = std::move(rep_pi.first);
    out.patches.push_back(std::move(p));
    out.pi.push_back(std::move(rep_pi.second));
  }
  return out;
}

}  // namespace

PatchDecomposition compute_patches(std::span<const Budget> budgets) {
  if (budgets.empty()) throw DomainError("at least one budget is required");
  const std::size_t k = budgets[0].pbar.size(), t_count = budgets.size();
  if (k > 4) throw UnsupportedDimension("geometric patch enumeration supports at most four goods");
  for (std::size_t t = 0; t < t_count; ++t) {
    if (budgets[t].pbar.size() != k) throw DomainError("budgets differ in dimension");
    for (const auto& p : budgets[t].pbar) {
      if (!p.is_positive()) throw NonPositivePrice("budget prices must be positive");
    }
    if (!budgets[t].total.is_positive()) throw DomainError("budget totals must be positive");
    for (std::size_t s = 0; s < t; ++s) {
      // Same hyperplane iff (pbar, m) are proportional.
      bool same = true;
      for (std::size_t j = 0; j < k && same; ++j) {
        same = budgets[t].pbar[j] * budgets[s].total == budgets[s].pbar[j] * budgets[t].total;
      }
      if (same) throw DomainError("budgets " + std::to_string(s + 1) + " and " + std::to_string(t + 1) + " coincide");
    }
  }

  std::map<Signs, std::pair<RationalVector, RationalVector>> cells;
  std::vector<std::vector<Signs>> per_budget(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    auto verts = arrangement_vertices(budgets, t, k);
    std::vector<Signs> vsigns;
    for (const auto& v : verts) vsigns.push_back(sign_vector(budgets, v));
    // Every cell's sign vector is the join of its vertices' sign vectors.
    std::set<Signs> candidates(vsigns.begin(), vsigns.end());
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<Signs> cur(candidates.begin(), candidates.end());
      for (std::size_t a = 0; a < cur.size(); ++a) {
        for (std::size_t b = a + 1; b < cur.size(); ++b) {
          if (compatible(cur[a], cur[b]) && candidates.insert(join(cur[a], cur[b])).second) grew = true;
        }
      }
    }
    for (const auto& cand : candidates) {
      RationalVector centroid(k, Rational(0));
      long count = 0;
      for (std::size_t v = 0; v < verts.size(); ++v) {
        if (!conforms(vsigns[v], cand)) continue;
        for (std::size_t j = 0; j < k; ++j) centroid[j] += verts[v][j];
        ++count;
      }
      if (count == 0) continue;
      for (auto& c : centroid) c /= Rational(count);
      if (sign_vector(budgets, centroid) != cand) continue;
      per_budget[t].push_back(cand);
      cells.try_emplace(cand, std::move(centroid), RationalVector(t_count, Rational(0)));
    }
  }
  for (std::size_t t = 0; t < t_count; ++t) {
    Rational share(1, static_cast<long>(per_budget[t].size()));
    for (const auto& s : per_budget[t]) cells[s].second[t] = share;
  }
  return finish(std::move(cells), t_count);
}

PatchDecomposition compute_patches(const CrossSection& cs) {
  const std::size_t t_count = cs.observations();
  std::vector<Budget> budgets;
  for (std::size_t t = 0; t < t_count; ++t) budgets.push_back({cs.at(t).pbar, cs.at(t).total});
  std::map<Signs, std::pair<RationalVector, RationalVector>> cells;
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t j = 0; j < cs.points_per_observation(); ++j) {
      Bundle x = cs.bundle(t, j);
      Signs s = sign_vector(budgets, x.values());
      auto [it, inserted] = cells.try_emplace(s, RationalVector(x.values().begin(), x.values().end()),
                                              RationalVector(t_count, Rational(0)));
      it->second.second[t] += cs.weight(t, j);
    }
  }
  return finish(std::move(cells), t_count);
}

}  // namespace hetprice::rum
