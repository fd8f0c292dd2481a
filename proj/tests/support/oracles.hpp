#pragma once

// Reference computations that share no code with the library solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "antflow/graph.hpp"
#include "antflow/weights.hpp"

namespace oracle {

inline double series(double a, double b) { return a * b / (a + b); }
inline double parallel(double a, double b) { return a + b; }

/// P(edge e is crossed before absorption at F), by pushing probability mass
/// along edges over (node, crossed-e flag) until less than `eps` remains.
inline double trace_probability(const antflow::MarkedGraph& g, const antflow::WeightVector& w,
                                antflow::EdgeIndex target, double eps = 1e-15) {
  const std::size_t n = g.node_count();
  std::vector<double> total(n, 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    total[g.edge(e).u] += w[e];
    total[g.edge(e).v] += w[e];
  }
  std::vector<double> mass(2 * n, 0.0), next(2 * n);
  mass[2 * g.nest()] = 1.0;
  double hit = 0.0;
  for (std::size_t step = 0; step < 50'000'000; ++step) {
    double remaining = 0.0;
    for (double m : mass) remaining += m;
    if (remaining < eps) return hit;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      for (int flag = 0; flag < 2; ++flag) {
        const double m = mass[2 * x + flag];
        if (m == 0.0 || total[x] == 0.0) continue;
        for (antflow::EdgeIndex e : g.incident(x)) {
          if (w[e] == 0.0) continue;
          const std::size_t y = g.edge(e).other(x);
          const int f = flag | (e == target ? 1 : 0);
          const double share = m * w[e] / total[x];
          if (y == g.food())
            hit += f ? share : 0.0;
          else
            next[2 * y + f] += share;
        }
      }
    }
    mass.swap(next);
  }
  throw std::runtime_error("mass propagation did not drain");
}

/// Expected visits to y from x before F, as sum_k Q^k by repeated
/// multiplication.
inline double green(const antflow::MarkedGraph& g, const antflow::WeightVector& w, antflow::NodeIndex x,
                    antflow::NodeIndex y, double eps = 1e-15) {
  const std::size_t n = g.node_count();
  std::vector<double> total(n, 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    total[g.edge(e).u] += w[e];
    total[g.edge(e).v] += w[e];
  }
  std::vector<double> mass(n, 0.0), next(n);
  mass[x] = 1.0;
  double visits = 0.0;
  for (std::size_t step = 0; step < 50'000'000; ++step) {
    visits += mass[y];
    double remaining = 0.0;
    for (double m : mass) remaining += m;
    if (remaining < eps) return visits;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      if (mass[a] == 0.0 || a == g.food() || total[a] == 0.0) continue;
      for (antflow::EdgeIndex e : g.incident(a)) {
        const std::size_t b = g.edge(e).other(a);
        if (b != g.food()) next[b] += mass[a] * w[e] / total[a];
      }
    }
    mass.swap(next);
  }
  throw std::runtime_error("Neumann series did not converge");
}

}  // namespace oracle
