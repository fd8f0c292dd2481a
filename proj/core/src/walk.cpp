#include "antflow/walk.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace antflow {

bool TraceRecord::contains(EdgeIndex e) const {
  return std::find(crossed.begin(), crossed.end(), e) != crossed.end();
}

namespace {

bool food_reachable(const MarkedGraph& g, const WeightVector& w) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeIndex> stack{g.nest()};
  seen[g.nest()] = 1;
  while (!stack.empty()) {
    const NodeIndex x = stack.back();
    stack.pop_back();
    if (x == g.food()) return true;
    for (EdgeIndex e : g.incident(x)) {
      const NodeIndex y = g.edge(e).other(x);
      if (w[e] > 0.0 && !seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return false;
}

bool hit_cap(const WalkOptions& opts, TraceRecord& trace) {
  if (opts.step_cap == 0 || trace.steps < opts.step_cap) return false;
  if (opts.strict) throw WalkCapError("walk exceeded " + std::to_string(opts.step_cap) + " steps");
  trace.capped = true;
  return true;
}

}  // namespace

TraceRecord sample_walk(const MarkedGraph& g, const WeightVector& w, Rng& rng, const WalkOptions& opts) {
  validate(g, w);
  if (!food_reachable(g, w)) throw DisconnectedError("food is not reachable from nest through positive weights");
  TraceRecord trace;
  std::vector<char> seen(g.edge_count(), 0);
  NodeIndex x = g.nest();
  while (x != g.food()) {
    if (hit_cap(opts, trace)) break;
    const auto inc = g.incident(x);
    double total = 0.0;
    for (EdgeIndex e : inc) total += w[e];
    double r = rng.uniform() * total;
    EdgeIndex chosen = inc.back();
    for (EdgeIndex e : inc) {
      if (w[e] <= 0.0) continue;
      chosen = e;
      if (r < w[e]) break;
      r -= w[e];
    }
    if (!seen[chosen]) {
      seen[chosen] = 1;
      trace.crossed.push_back(chosen);
    }
    x = g.edge(chosen).other(x);
    ++trace.steps;
  }
  return trace;
}

bool trace_is_connected(const MarkedGraph& g, std::span<const EdgeIndex> crossed) {
  std::vector<char> in_trace(g.edge_count(), 0);
  for (EdgeIndex e : crossed) in_trace.at(e) = 1;
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeIndex> stack{g.nest()};
  seen[g.nest()] = 1;
  std::size_t touched = 0;
  while (!stack.empty()) {
    const NodeIndex x = stack.back();
    stack.pop_back();
    for (EdgeIndex e : g.incident(x)) {
      if (!in_trace[e]) continue;
      const NodeIndex y = g.edge(e).other(x);
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  for (EdgeIndex e : crossed)
    if (seen[g.edge(e).u] && seen[g.edge(e).v]) ++touched;
  return seen[g.food()] && touched == crossed.size();
}

ProcessResult run_process(const MarkedGraph& g, std::uint64_t n_ants, std::uint64_t seed,
                          std::uint64_t stream, const ProcessOptions& opts) {
  if (n_ants < 1) throw Error("n_ants must be at least 1");
  for (std::size_t i = 0; i < opts.schedule.size(); ++i) {
    if (opts.schedule[i] < 1 || opts.schedule[i] > n_ants || (i > 0 && opts.schedule[i] <= opts.schedule[i - 1]))
      throw Error("record schedule must be strictly increasing within [1, n_ants]");
  }

  const std::size_t m = g.edge_count();
  ProcessResult result;
  result.n_ants = n_ants;
  result.seed = seed;
  result.stream = stream;
  result.counts.assign(m, 1);
  auto& counts = result.counts;
  std::vector<std::uint64_t> total(g.node_count(), 0);
  for (NodeIndex x = 0; x < g.node_count(); ++x) total[x] = g.degree(x);

  Rng rng(seed, stream);
  std::vector<std::uint64_t> stamp(m, 0);
  TraceRecord trace;
  auto next_record = opts.schedule.begin();

  for (std::uint64_t ant = 1; ant <= n_ants; ++ant) {
    trace.crossed.clear();
    trace.steps = 0;
    trace.capped = false;
    NodeIndex x = g.nest();
    while (x != g.food()) {
      if (hit_cap(opts.walk, trace)) break;
      const auto inc = g.incident(x);
      std::uint64_t r = rng.below(total[x]);
      EdgeIndex chosen = inc.back();
      for (EdgeIndex e : inc) {
        if (r < counts[e]) {
          chosen = e;
          break;
        }
        r -= counts[e];
      }
      if (stamp[chosen] != ant) {
        stamp[chosen] = ant;
        trace.crossed.push_back(chosen);
      }
      x = g.edge(chosen).other(x);
      ++trace.steps;
    }
    for (EdgeIndex e : trace.crossed) {
      ++counts[e];
      ++total[g.edge(e).u];
      ++total[g.edge(e).v];
    }
    result.total_steps += trace.steps;
    if (opts.observer) opts.observer(ant, counts, trace);
    if (opts.keep_traces) result.traces.push_back(trace);
    if (next_record != opts.schedule.end() && *next_record == ant) {
      Snapshot snap{ant, std::vector<double>(m)};
      for (EdgeIndex e = 0; e < m; ++e) snap.normalized[e] = static_cast<double>(counts[e]) / static_cast<double>(ant);
      result.snapshots.push_back(std::move(snap));
      ++next_record;
    }
  }
  return result;
}

std::vector<std::uint64_t> geometric_schedule(std::uint64_t n, double ratio) {
  if (ratio <= 1.0) throw Error("schedule ratio must exceed 1");
  std::vector<std::uint64_t> out;
  for (double t = 1.0; t < static_cast<double>(n); t *= ratio) {
    const auto v = static_cast<std::uint64_t>(std::ceil(t - 1e-9));
    if (v >= n) break;
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  if (n >= 1) out.push_back(n);
  return out;
}

MartingaleReport martingale_residuals(
    const MarkedGraph& g, std::span<const TraceRecord> traces,
    const std::function<std::vector<double>(const WeightVector&)>& field_p) {
  const std::size_t m = g.edge_count();
  MartingaleReport rep;
  rep.mean.assign(m, 0.0);
  rep.scaled_sum.assign(m, 0.0);
  rep.residuals.reserve(traces.size());
  auto w = WeightVector::ones(g);
  std::vector<char> hit(m, 0);
  for (const auto& trace : traces) {
    const auto p = field_p(w);
    std::fill(hit.begin(), hit.end(), 0);
    for (EdgeIndex e : trace.crossed) hit.at(e) = 1;
    std::vector<double> xi(m);
    for (EdgeIndex e = 0; e < m; ++e) {
      xi[e] = (hit[e] ? 1.0 : 0.0) - p[e];
      rep.mean[e] += xi[e];
      if (hit[e]) w[e] += 1.0;
    }
    rep.residuals.push_back(std::move(xi));
  }
  if (!traces.empty()) {
    const double n = static_cast<double>(traces.size());
    for (EdgeIndex e = 0; e < m; ++e) {
      rep.scaled_sum[e] = rep.mean[e] / std::sqrt(n);
      rep.mean[e] /= n;
    }
  }
  return rep;
}

void write_trajectory_csv(std::ostream& out, const MarkedGraph& g, std::span<const Snapshot> snapshots) {
  out << 'n';
  for (const Edge& e : g.edges()) out << ',' << e.id;
  out << '\n';
  out << std::setprecision(12);
  for (const auto& s : snapshots) {
    out << s.n;
    for (double v : s.normalized) out << ',' << v;
    out << '\n';
  }
}

}  // namespace antflow
