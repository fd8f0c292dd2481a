#pragma once

#include <string_view>
#include <vector>

#include "antflow/graph.hpp"

namespace antflow {

enum class LimitMethod { ClosedForm, ContractionIteration, RootFinding, DirichletDistribution };

std::string_view to_string(LimitMethod m);

/// Deterministic limit of W(n)/n for a recognised family, in the edge order
/// of `graph`, or the Dirichlet law of a parallel nest-food bundle.
struct LimitPrediction {
  GraphFamily family;
  std::vector<double> limit;
  LimitMethod method = LimitMethod::ClosedForm;
  /// sup |F(limit)| under the general solver; NaN for distributional predictions.
  double residual = 0.0;
  /// For DirichletDistribution: bundle edges and their parameters. `limit`
  /// then holds the Dirichlet means on the bundle and 0 elsewhere.
  std::vector<EdgeIndex> dirichlet_edges;
  std::vector<double> dirichlet_params;

  bool deterministic() const noexcept { return method != LimitMethod::DirichletDistribution; }
  /// True for edges whose limit is a point (every edge outside a bundle).
  bool deterministic_edge(EdgeIndex e) const;
};

/// Tree-like graphs: 1 on the direct edge, 0 elsewhere; with l > 1 parallel
/// direct edges, Dirichlet(1,...,1) on the bundle. Throws FamilyError otherwise.
LimitPrediction limit_tree_like(const MarkedGraph& g);

/// (1, 1/3, 1/3, 0) on a cone-shaped graph.
LimitPrediction limit_cone(const MarkedGraph& g);
LimitPrediction limit_cone();

/// f_p(x) = 1 - x^p (1-x) / (1-x^p), continuous on [0,1] with f_p(1) = 1 - 1/p.
double f_p(int p, double x);

struct ContractionResult {
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  /// max residual of alpha^p + beta^q = 1 and alpha^p(1-alpha) = beta^q(1-beta).
  double residual_power_system = 0.0;
  /// max residual of alpha = f_q(beta), beta = f_p(alpha).
  double residual_map_system = 0.0;
};

/// Iterates alpha <- f_q(f_p(alpha)) from 1/2 until the step is below 1e-14.
/// Throws FamilyError when min(p,q) < 2 and ConvergenceError after 10^4 steps.
ContractionResult contraction_fp(int p, int q);

/// w_{a_k} = alpha^k, w_{b_l} = beta^l on a graph classified as TwoPaths.
LimitPrediction limit_two_paths(const MarkedGraph& g);
LimitPrediction limit_two_paths(int p, int q);

struct SandwichState {
  std::vector<double> lower;
  std::vector<double> upper;
  int iteration = 0;

  double gap() const;
};

/// The H-map H_{a_k}(u,v) = S^a_k(u) / (S^a_k(u) + S^b_q(v)) (and the mirror
/// for b) on vectors (a_1..a_p, b_1..b_q).
std::vector<double> sandwich_map(int p, int q, const std::vector<double>& u, const std::vector<double>& v);

/// u^(0) = (u0^k), v^(0) = 1, then u <- H(u,v), v <- H(v,u) until the gap
/// drops below `gap_tol` or `n_max` steps. Requires
/// 0 < u0 < min(1 - 1/p, 1 - 1/q, alpha, beta). Throws ConvergenceError on a
/// monotonicity violation (beyond rounding) or when lower exceeds upper.
std::vector<SandwichState> sandwich_iteration(int p, int q, double u0 = 0.05, int n_max = 2000,
                                              double gap_tol = 1e-13);

/// 2x^3 + 4x^2 - 2x - 3/2.
double losange_cubic(double x);
/// Unique root in (0,1), by bisection to full double precision.
double losange_root();

LimitPrediction limit_losange(const MarkedGraph& g);
LimitPrediction limit_losange();

/// Dispatch on classify(g). Throws FamilyError for General graphs.
LimitPrediction predict_limit(const MarkedGraph& g);

}  // namespace antflow
