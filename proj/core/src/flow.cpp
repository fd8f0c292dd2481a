#include "antflow/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "antflow/field.hpp"

namespace antflow {

FlowSystem make_flow_system(const MarkedGraph& g, FieldSource source) {
  FlowSystem sys;
  sys.dim = g.edge_count();
  sys.family = classify(g);
  const auto& fam = sys.family;
  const auto& ce = fam.canonical_edges;
  switch (fam.tag) {
    case FamilyTag::Cone: sys.unit_pairs = {{ce[0], ce[3]}}; break;
    case FamilyTag::Losange: sys.unit_pairs = {{ce[1], ce[4]}}; break;
    case FamilyTag::TwoPaths: sys.unit_pairs = {{ce[fam.p - 1], ce.back()}}; break;
    default: break;
  }

  auto graph = std::make_shared<const MarkedGraph>(g);
  sys.drift = [graph](std::span<const double> y) {
    const auto eval = field(*graph, WeightVector({y.begin(), y.end()}));
    return std::vector<double>(eval.F.begin(), eval.F.end());
  };
  if (source == FieldSource::General) return sys;

  std::function<std::vector<double>(std::span<const double>)> closed;
  switch (fam.tag) {
    case FamilyTag::Cone:
      closed = [](std::span<const double> c) {
        const auto f = closed_form_cone(c);
        return std::vector<double>(f.F.begin(), f.F.end());
      };
      break;
    case FamilyTag::Losange:
      closed = [](std::span<const double> c) {
        const auto f = closed_form_losange(c).eval;
        return std::vector<double>(f.F.begin(), f.F.end());
      };
      break;
    case FamilyTag::TwoPaths:
      closed = [p = fam.p, q = fam.q](std::span<const double> c) {
        const auto f = closed_form_two_paths(p, q, c);
        return std::vector<double>(f.F.begin(), f.F.end());
      };
      break;
    default: return sys;
  }
  sys.drift = [fallback = sys.drift, closed, fam, m = g.edge_count()](std::span<const double> y) {
    std::vector<double> c(fam.canonical_edges.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = y[fam.canonical_edges[i]];
    try {
      const auto fc = closed(c);
      if (std::all_of(fc.begin(), fc.end(), [](double v) { return std::isfinite(v); })) {
        std::vector<double> out(m);
        for (std::size_t i = 0; i < fc.size(); ++i) out[fam.canonical_edges[i]] = fc[i];
        return out;
      }
    } catch (const FamilyError&) {
    }
    return fallback(y);
  };
  return sys;
}

void project(const FlowSystem& sys, std::span<double> y) {
  for (double& v : y) v = std::clamp(v, 0.0, 1.0);
  for (auto [i, j] : sys.unit_pairs) {
    const double d = 0.5 * (1.0 - y[i] - y[j]);
    y[i] += d;
    y[j] += d;
  }
}

namespace {

double sup_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

FlowTrajectory integrate(const FlowSystem& sys, std::span<const double> y0, const FlowOptions& opts) {
  if (!(opts.dt > 0.0)) throw Error("integration step must be positive");
  if (y0.size() != sys.dim) throw Error("start vector has the wrong dimension");
  const std::size_t n = sys.dim;
  const auto steps_per_unit = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / opts.dt)));
  const auto total_steps = static_cast<std::size_t>(std::ceil(opts.t_max / opts.dt - 1e-9));

  FlowTrajectory traj;
  std::vector<double> y(y0.begin(), y0.end());
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(y);
  };
  record(0.0);

  std::vector<double> f = sys.drift(y);
  if (!all_finite(f)) {
    traj.terminal = FlowTerminal::LeftDomain;
    return traj;
  }
  if (sup_norm(f) < opts.rest_tolerance) {
    traj.terminal = FlowTerminal::Converged;
    traj.final_drift = sup_norm(f);
    return traj;
  }

  std::vector<double> window_start = y, tmp(n);
  std::vector<double> k2, k3, k4;
  const double h = opts.dt;
  for (std::size_t step = 1; step <= total_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * f[i];
    k2 = sys.drift(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = sys.drift(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = sys.drift(tmp);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    project(sys, y);
    const double t = static_cast<double>(step) * h;

    if (!all_finite(y)) {
      record(t);
      traj.terminal = FlowTerminal::LeftDomain;
      return traj;
    }
    f = sys.drift(y);
    if (!all_finite(f)) {
      record(t);
      traj.terminal = FlowTerminal::LeftDomain;
      return traj;
    }
    const bool last = step == total_steps;
    if (step % steps_per_unit == 0) {
      double moved = 0.0;
      for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(y[i] - window_start[i]));
      window_start = y;
      if (sup_norm(f) < opts.rest_tolerance && moved < opts.window_tolerance) {
        record(t);
        traj.terminal = FlowTerminal::Converged;
        traj.final_drift = sup_norm(f);
        return traj;
      }
    }
    if (last || step % opts.record_every == 0) record(t);
  }
  traj.terminal = FlowTerminal::MaxTimeReached;
  traj.final_drift = sup_norm(f);
  return traj;
}

std::vector<double> lyapunov_trace_losange(const FlowTrajectory& traj) {
  std::vector<double> h;
  h.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    if (s.size() != 5) throw FamilyError("losange trajectory needs 5 coordinates");
    const double u = s[1] - 0.5;
    const double v = s[0] / (s[0] + s[3]) - 0.5;
    h.push_back(std::max(std::abs(u), std::abs(v)));
  }
  return h;
}

Slice family_slice(const MarkedGraph& g, const GraphFamily& family) {
  Slice s;
  const std::size_t m = g.edge_count();
  const auto ce = family.canonical_edges;
  switch (family.tag) {
    case FamilyTag::Cone:
      s.box = {{0.0, 1.0}, {0.0, 1.0}};
      s.embed = [ce, m](std::span<const double> z) {
        std::vector<double> y(m, 0.0);
        y[ce[0]] = 1.0;
        y[ce[1]] = z[0];
        y[ce[2]] = z[1];
        return y;
      };
      s.residual_coords = {ce[1], ce[2]};
      return s;
    case FamilyTag::Losange:
      s.box = {{0.5, 1.0}};
      s.embed = [ce, m](std::span<const double> z) {
        std::vector<double> y(m, 0.5);
        y[ce[0]] = z[0];
        y[ce[3]] = z[0];
        return y;
      };
      s.residual_coords = {ce[0]};
      return s;
    default:
      s.box.assign(m, {0.0, 1.0});
      s.embed = [](std::span<const double> z) { return std::vector<double>(z.begin(), z.end()); };
      for (std::size_t e = 0; e < m; ++e) s.residual_coords.push_back(e);
      return s;
  }
}

namespace {

std::vector<double> residual(const FlowSystem& sys, const Slice& slice, std::span<const double> z) {
  const auto f = sys.drift(slice.embed(z));
  std::vector<double> r;
  for (auto c : slice.residual_coords) r.push_back(f[c]);
  return r;
}

// Returns the full drift at the embedded point, or an empty vector when it
// cannot be evaluated there.
std::vector<double> safe_drift(const FlowSystem& sys, const Slice& slice, std::span<const double> z) {
  try {
    auto f = sys.drift(slice.embed(z));
    if (all_finite(f)) return f;
  } catch (const Error&) {
  }
  return {};
}

std::vector<double> newton(const FlowSystem& sys, const Slice& slice, std::vector<double> z,
                           const RestPointOptions& opts) {
  const std::size_t k = z.size();
  auto clamp_box = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < k; ++i) v[i] = std::clamp(v[i], slice.box[i].first, slice.box[i].second);
  };
  std::vector<double> r;
  try {
    r = residual(sys, slice, z);
  } catch (const Error&) {
    return z;
  }
  for (int it = 0; it < opts.max_newton && sup_norm(r) > 1e-3 * opts.tolerance; ++it) {
    Eigen::MatrixXd jac(r.size(), k);
    try {
      for (std::size_t j = 0; j < k; ++j) {
        const double h = 1e-7;
        auto zp = z, zm = z;
        zp[j] = std::min(z[j] + h, slice.box[j].second);
        zm[j] = std::max(z[j] - h, slice.box[j].first);
        const auto rp = residual(sys, slice, zp);
        const auto rm = residual(sys, slice, zm);
        for (std::size_t i = 0; i < r.size(); ++i) jac(i, j) = (rp[i] - rm[i]) / (zp[j] - zm[j]);
      }
    } catch (const Error&) {
      return z;
    }
    Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
    Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(rv);
    if (!step.allFinite()) return z;
    double scale = 1.0;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries, scale *= 0.5) {
      auto cand = z;
      for (std::size_t j = 0; j < k; ++j) cand[j] -= scale * step(j);
      clamp_box(cand);
      try {
        auto rc = residual(sys, slice, cand);
        if (all_finite(rc) && sup_norm(rc) < sup_norm(r)) {
          z = std::move(cand);
          r = std::move(rc);
          improved = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!improved) break;
  }
  return z;
}

}  // namespace

std::vector<std::vector<double>> rest_points(const FlowSystem& sys, const Slice& slice,
                                             const RestPointOptions& opts) {
  const std::size_t k = slice.box.size();
  std::vector<std::vector<double>> starts;
  // Tensor grid (only for low-dimensional slices) including the box corners.
  if (k <= 3 && opts.grid_per_axis >= 2) {
    std::vector<std::size_t> idx(k, 0);
    while (true) {
      std::vector<double> z(k);
      for (std::size_t i = 0; i < k; ++i) {
        const auto [lo, hi] = slice.box[i];
        z[i] = lo + (hi - lo) * static_cast<double>(idx[i]) / static_cast<double>(opts.grid_per_axis - 1);
      }
      starts.push_back(std::move(z));
      std::size_t d = 0;
      while (d < k && ++idx[d] == opts.grid_per_axis) idx[d++] = 0;
      if (d == k) break;
    }
  }
  Rng rng(opts.seed, 0);
  for (std::size_t s = 0; s < opts.random_starts; ++s) {
    std::vector<double> z(k);
    for (std::size_t i = 0; i < k; ++i) z[i] = rng.uniform(slice.box[i].first, slice.box[i].second);
    starts.push_back(std::move(z));
  }

  std::vector<std::vector<double>> found;
  for (auto& z0 : starts) {
    const auto z = newton(sys, slice, z0, opts);
    const auto f = safe_drift(sys, slice, z);
    if (f.empty() || sup_norm(f) >= opts.tolerance) continue;
    auto y = slice.embed(z);
    const bool dup = std::any_of(found.begin(), found.end(), [&](const auto& other) {
      return sup_distance(other, y) < opts.cluster_radius;
    });
    if (!dup) found.push_back(std::move(y));
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::vector<double> sample_attraction_region(const MarkedGraph& g, const GraphFamily& family, Rng& rng,
                                             double u0) {
  const std::size_t m = g.edge_count();
  const auto catalog = enumerate_paths(g);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> c;
    switch (family.tag) {
      case FamilyTag::Cone:
        c = {1.0, rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0), 0.0};
        break;
      case FamilyTag::Losange: {
        const double w2 = rng.uniform(0.02, 0.98);
        const double w1 = rng.uniform(0.02, 1.0);
        const double w4 = rng.uniform(std::max(0.02, 1.0 - w1), 1.0);
        const double w3 = rng.uniform(0.0, 1.0);
        c = {w1, w2, w3, w4, 1.0 - w2};
        if (w2 > w1 + w3 || 1.0 - w2 > w3 + w4) continue;
        break;
      }
      case FamilyTag::TwoPaths: {
        const int p = family.p, q = family.q;
        c.assign(p + q, 0.0);
        const double lo = std::pow(u0, p), hi = 1.0 - std::pow(u0, q);
        c[p - 1] = rng.uniform(lo, hi);
        c[p + q - 1] = 1.0 - c[p - 1];
        for (int k = p - 1; k >= 1; --k) c[k - 1] = rng.uniform(std::max(c[k], std::pow(u0, k)), 1.0);
        for (int l = q - 1; l >= 1; --l) c[p + l - 1] = rng.uniform(std::max(c[p + l], std::pow(u0, l)), 1.0);
        break;
      }
      default:
        throw FamilyError("no attraction region is known for this graph family");
    }
    auto w = from_canonical(family, c, m);
    if (membership_E(g, catalog, w)) return std::vector<double>(w.begin(), w.end());
  }
  throw ConvergenceError("could not sample a start point in the attraction region");
}

}  // namespace antflow
