#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "antflow/graph.hpp"
#include "antflow/rng.hpp"
#include "antflow/weights.hpp"

namespace antflow {

/// Edges crossed at least once by one ant (in first-crossing order), and
/// the number of steps it took.
struct TraceRecord {
  std::vector<EdgeIndex> crossed;
  std::uint64_t steps = 0;
  bool capped = false;

  bool contains(EdgeIndex e) const;
};

struct WalkOptions {
  /// 0 disables the cap. A capped walk is truncated, which biases the law.
  std::uint64_t step_cap = 0;
  /// Throw WalkCapError instead of returning a capped trace.
  bool strict = false;
};

/// One walk from N, moving along each incident edge with probability
/// proportional to its weight, stopped on reaching F. Requires F to be
/// reachable from N through positive weights (checked).
TraceRecord sample_walk(const MarkedGraph& g, const WeightVector& w, Rng& rng, const WalkOptions& opts = {});

/// The crossed edges form a connected subgraph containing N and F.
bool trace_is_connected(const MarkedGraph& g, std::span<const EdgeIndex> crossed);

struct Snapshot {
  std::uint64_t n = 0;
  /// W_e(n) / n.
  std::vector<double> normalized;
};

struct ProcessOptions {
  /// Times at which W(n)/n is recorded; strictly increasing, each in [1, n_ants].
  std::vector<std::uint64_t> schedule;
  bool keep_traces = false;
  WalkOptions walk;
  /// Called after every ant with (n, counts W(n), trace of ant n).
  std::function<void(std::uint64_t, std::span<const std::uint64_t>, const TraceRecord&)> observer;
};

struct ProcessResult {
  std::vector<Snapshot> snapshots;
  std::vector<std::uint64_t> counts;
  std::vector<TraceRecord> traces;
  std::uint64_t n_ants = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t total_steps = 0;
};

/// The reinforced process from W(0) = 1: ant n+1 walks with weights W(n)
/// and every edge of its trace gains 1. Deterministic given (seed, stream).
ProcessResult run_process(const MarkedGraph& g, std::uint64_t n_ants, std::uint64_t seed,
                          std::uint64_t stream = 0, const ProcessOptions& opts = {});

/// ceil(1.2^k) for k = 0, 1, ... up to n, deduplicated, with n appended.
std::vector<std::uint64_t> geometric_schedule(std::uint64_t n, double ratio = 1.2);

struct MartingaleReport {
  /// residuals[n][e] = 1{e in trace of ant n+1} - p_e(W(n)).
  std::vector<std::vector<double>> residuals;
  std::vector<double> mean;
  /// Per-edge partial sum divided by sqrt(number of steps).
  std::vector<double> scaled_sum;
};

/// Replays `traces` from W(0) = 1. `field_p` maps a weight vector to p(w);
/// p is scale invariant so raw counts are passed.
MartingaleReport martingale_residuals(
    const MarkedGraph& g, std::span<const TraceRecord> traces,
    const std::function<std::vector<double>(const WeightVector&)>& field_p);

/// CSV with header `n,<edge-id>...` and one row per snapshot.
void write_trajectory_csv(std::ostream& out, const MarkedGraph& g, std::span<const Snapshot> snapshots);

}  // namespace antflow
