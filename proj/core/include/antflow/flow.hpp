#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "antflow/graph.hpp"
#include "antflow/rng.hpp"
#include "antflow/weights.hpp"

namespace antflow {

enum class FieldSource { General, ClosedForm };

/// The vector field of a graph in edge-index coordinates together with the
/// affine identities the flow must keep (pairs of coordinates summing to 1).
struct FlowSystem {
  std::size_t dim = 0;
  std::function<std::vector<double>(std::span<const double>)> drift;
  std::vector<std::pair<std::size_t, std::size_t>> unit_pairs;
  GraphFamily family;
};

/// ClosedForm uses the family formula when one exists and falls back to the
/// general solver elsewhere (and at points where the formula degenerates).
FlowSystem make_flow_system(const MarkedGraph& g, FieldSource source = FieldSource::ClosedForm);

enum class FlowTerminal { Converged, MaxTimeReached, LeftDomain };

struct FlowOptions {
  double dt = 1e-3;
  double t_max = 200.0;
  /// Converged requires sup|F| below this ...
  double rest_tolerance = 1e-9;
  /// ... and a displacement over the last unit of time below this.
  double window_tolerance = 1e-9;
  /// Keep every k-th step in the trajectory (the final state is always kept).
  std::size_t record_every = 100;
};

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  FlowTerminal terminal = FlowTerminal::MaxTimeReached;
  double final_drift = 0.0;

  const std::vector<double>& final_state() const { return states.back(); }
};

/// Clamp to [0,1] and restore each unit pair by orthogonal projection.
void project(const FlowSystem& sys, std::span<double> y);

/// Classical RK4 with projection after every step. Throws Error when dt <= 0.
FlowTrajectory integrate(const FlowSystem& sys, std::span<const double> y0, const FlowOptions& opts = {});

/// h = max(|w2 - 1/2|, |w1/(w1+w4) - 1/2|) at each recorded state, for a
/// losange trajectory in canonical coordinates.
std::vector<double> lyapunov_trace_losange(const FlowTrajectory& traj);

/// A low-dimensional parametrisation of the region searched for zeros.
struct Slice {
  std::vector<std::pair<double, double>> box;
  std::function<std::vector<double>(std::span<const double>)> embed;
  /// Coordinates of F driven to zero by the Newton iteration.
  std::vector<std::size_t> residual_coords;
};

/// Cone: (w2, w3) with w1 = 1, w4 = 0. Losange: w1 = w4 = x on [1/2, 1]
/// with w2 = w3 = w5 = 1/2. Otherwise the full box [0,1]^E.
Slice family_slice(const MarkedGraph& g, const GraphFamily& family);

struct RestPointOptions {
  double tolerance = 1e-9;
  std::size_t random_starts = 48;
  std::size_t grid_per_axis = 5;
  std::uint64_t seed = 7;
  double cluster_radius = 1e-6;
  int max_newton = 200;
};

/// Damped Newton from grid and random starts in the slice; returns the
/// distinct full states with sup|F| < tolerance, sorted lexicographically.
std::vector<std::vector<double>> rest_points(const FlowSystem& sys, const Slice& slice,
                                             const RestPointOptions& opts = {});

/// Sampler for the region from which the flow is known to converge:
/// cone {w1 = 1, w2 w3 > 0}; losange {w in E', w1 w4 > 0}; two paths the
/// first sandwich set K_0 with lower corner u0^k.
std::vector<double> sample_attraction_region(const MarkedGraph& g, const GraphFamily& family, Rng& rng,
                                             double u0 = 0.05);

}  // namespace antflow
