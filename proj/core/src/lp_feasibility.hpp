#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace antflow::detail {

struct LpRow {
  std::vector<double> a;
  double b = 0.0;
  char sense = 'L';  // 'L' a.x <= b, 'E' a.x == b, 'G' a.x >= b
};

// Phase-one simplex on a dense tableau with Bland's rule: is there x >= 0
// satisfying every row? Sizes here are tens to a few hundred columns.
inline bool lp_feasible(std::vector<LpRow> rows, std::size_t nvars, double tol = 1e-9) {
  const std::size_t m = rows.size();
  std::size_t n_slack = 0, n_art = 0;
  for (auto& r : rows) {
    if (r.b < 0) {
      for (double& v : r.a) v = -v;
      r.b = -r.b;
      if (r.sense != 'E') r.sense = r.sense == 'L' ? 'G' : 'L';
    }
    if (r.sense != 'E') ++n_slack;
    if (r.sense != 'L') ++n_art;
  }
  const std::size_t cols = nvars + n_slack + n_art;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::size_t next_slack = nvars, next_art = nvars + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nvars; ++j) t[i][j] = rows[i].a[j];
    t[i][cols] = rows[i].b;
    if (rows[i].sense == 'L') {
      t[i][next_slack] = 1.0;
      basis[i] = next_slack++;
    } else {
      if (rows[i].sense == 'G') t[i][next_slack++] = -1.0;
      t[i][next_art] = 1.0;
      basis[i] = next_art++;
      for (std::size_t j = 0; j < nvars + n_slack; ++j) t[m][j] -= t[i][j];
      t[m][cols] -= t[i][cols];
    }
  }

  for (std::size_t iter = 0; iter < 100000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (t[m][j] < -tol) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= tol) continue;
      const double ratio = t[i][cols] / t[i][enter];
      if (leave == m || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for phase one
    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double factor = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.b));
  return -t[m][cols] <= tol * scale;
}

}  // namespace antflow::detail
