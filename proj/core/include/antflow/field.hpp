#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "antflow/graph.hpp"
#include "antflow/weights.hpp"

namespace antflow {

/// p_e(w), the probability that edge e belongs to the trace of one
/// w-weighted walk from N killed at F, and the drift F_e = p_e - w_e.
struct FieldEvaluation {
  WeightVector p;
  WeightVector F;

  double sup_drift() const;
};

/// Probability that `e` is crossed before absorption. Zero-weight edges are
/// treated as absent and get 0. Throws DisconnectedError when F cannot be
/// reached from N through positive weights.
double exact_trace_probability(const MarkedGraph& g, const WeightVector& w, EdgeIndex e);

FieldEvaluation field(const MarkedGraph& g, const WeightVector& w);

/// 1 / sum(1/w_i); 0 as soon as one term is 0 (and for an empty range).
double harmonic_sum(std::span<const double> w);

// Closed forms. Inputs and outputs use the canonical edge order of each
// family (see GraphFamily::canonical_edges).

/// Cone, w = (w1, w2, w3, w4). Throws FamilyError on a degenerate
/// denominator.
FieldEvaluation closed_form_cone(std::span<const double> w);

/// Strict positivity region of F2 on the cone slice w1 = 1, w4 = 0:
/// w3 (1 - 2 w2) > w2^2.
bool cone_f2_positive(double w2, double w3);

/// (p,q)-paths, w = (a_1..a_p, b_1..b_q). Exact for any nonnegative w.
FieldEvaluation closed_form_two_paths(int p, int q, std::span<const double> w);

struct LosangeField {
  FieldEvaluation eval;
  /// F2 in factored form, w2 w5 (w1/(w1+w4) - w2) / (w3 + w2 w5 + w1 w4/(w1+w4)).
  double f2_factored = 0.0;
  /// w1/(w1+w2+w3) and w4/(w3+w4+w5), set to 0 when the numerator is 0.
  double lambda1 = 0.0;
  double lambda4 = 0.0;
};

/// Losange, w = (w1..w5) with w2 + w5 = 1. Throws FamilyError when
/// w1 + w4 = 0.
LosangeField closed_form_losange(std::span<const double> w);

/// Gather `w` into the canonical order of `family` and back.
std::vector<double> to_canonical(const GraphFamily& family, const WeightVector& w);
WeightVector from_canonical(const GraphFamily& family, std::span<const double> canonical,
                            std::size_t edge_count);

/// Membership in the convex hull of the sets
///   E_i = { w in [0,1]^E : pi_w(N) >= 1, w_e >= 1/S for every e on path i }.
/// A direct test against each E_i runs first; otherwise a small linear
/// feasibility problem decides membership in the hull. `slack` absorbs
/// rounding in the inequalities.
bool membership_E(const MarkedGraph& g, const PathCatalog& catalog, const WeightVector& w,
                  double slack = 1e-12);

/// Integer form of the direct test for X = counts / denominator; no rounding.
bool in_some_E_i(const MarkedGraph& g, const PathCatalog& catalog,
                 std::span<const std::uint64_t> counts, std::uint64_t denominator);

/// K = 1 + 2 (1 + d(N) h_max S^2).
double lipschitz_bound(const MarkedGraph& g, const PathCatalog& catalog);

}  // namespace antflow
