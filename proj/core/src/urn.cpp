#include "antflow/urn.hpp"

#include <algorithm>
#include <cmath>

#include "antflow/errors.hpp"
#include "antflow/stats.hpp"
#include "parallel.hpp"

namespace antflow {

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) throw Error("tabulation needs matching x/y with at least 2 points");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw Error("tabulation abscissae must be strictly increasing");
}

TabulatedFunction TabulatedFunction::sample(const UrnFunction& f, std::size_t points) {
  auto x = uniform_grid(points);
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), f);
  return TabulatedFunction(std::move(x), std::move(y));
}

double TabulatedFunction::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return y_[i] + t * (y_[i + 1] - y_[i]);
}

namespace urn_functions {

UrnFunction polya() {
  return [](double x) { return x; };
}

UrnFunction ratio(double q) {
  if (!(q > 0)) throw Error("ratio urn needs q > 0");
  return [q](double x) { return x / (x + 1.0 / q); };
}

UrnFunction shifted(double eps) {
  if (!(eps >= 0 && eps < 1)) throw Error("shifted urn needs 0 <= eps < 1");
  return [eps](double x) { return x / (x + 1.0 - eps); };
}

UrnFunction distance_one_bound(double k) {
  if (!(k > 0)) throw Error("distance-one bound needs k > 0");
  return [k](double x) {
    const double rest = k * (1.0 - x) / (k + 1.0 - x);
    return x + rest > 0.0 ? x / (x + rest) : 0.0;
  };
}

UrnFunction constant(double c) {
  return [c](double) { return c; };
}

}  // namespace urn_functions

void validate(const UrnSpec& spec) {
  if (!spec.G) throw Error("urn function is empty");
  if (spec.start_value < 1) throw Error("urn start value must be at least 1");
  if (spec.start_value > spec.start_time + 2) throw Error("urn start value exceeds start time + 2");
  for (double x : uniform_grid(101)) {
    const double g = spec.G(x);
    if (!(g >= 0.0 && g <= 1.0)) throw Error("urn function leaves [0,1] at x = " + std::to_string(x));
  }
}

std::vector<std::uint64_t> simulate_urn(const UrnSpec& spec, std::uint64_t n_steps, Rng& rng) {
  validate(spec);
  std::vector<std::uint64_t> path;
  path.reserve(n_steps + 1);
  std::uint64_t x = spec.start_value;
  path.push_back(x);
  for (std::uint64_t n = spec.start_time; n < spec.start_time + n_steps; ++n) {
    const double hat = static_cast<double>(x) / static_cast<double>(n + 2);
    if (rng.uniform() < spec.G(hat)) ++x;
    path.push_back(x);
  }
  return path;
}

std::vector<double> urn_final_values(const UrnSpec& spec, std::uint64_t n_steps, std::size_t replicas,
                                     std::uint64_t seed) {
  validate(spec);
  std::vector<double> out(replicas);
  detail::parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    const auto path = simulate_urn(spec, n_steps, rng);
    out[r] = static_cast<double>(path.back()) / static_cast<double>(spec.start_time + n_steps + 2);
  });
  return out;
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw Error("grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::vector<double> stable_fixed_points(const UrnFunction& G, std::span<const double> grid, double tol) {
  auto gap = [&](double x) { return G(x) - x; };
  std::vector<double> fixed;
  for (double x : grid)
    if (std::abs(gap(x)) < tol) fixed.push_back(x);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double lo = grid[i], hi = grid[i + 1];
    double glo = gap(lo), ghi = gap(hi);
    if (!(glo * ghi < 0.0) || std::abs(glo) < tol || std::abs(ghi) < tol) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = gap(mid);
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    fixed.push_back(0.5 * (lo + hi));
  }
  std::sort(fixed.begin(), fixed.end());

  const double h = 1e-6;
  const double lo_edge = grid.empty() ? 0.0 : grid.front();
  const double hi_edge = grid.empty() ? 1.0 : grid.back();
  std::vector<double> stable;
  for (double p : fixed) {
    const double a = std::max(lo_edge, p - h), b = std::min(hi_edge, p + h);
    const double slope = (G(b) - G(a)) / (b - a);
    if (slope <= 1.0 + tol && (stable.empty() || p - stable.back() > 1e-12)) stable.push_back(p);
  }
  return stable;
}

DominationReport domination_check(const UrnSpec& lower, std::span<const std::vector<std::uint64_t>> upper_paths,
                                  std::span<const std::uint64_t> times, std::size_t replicas, std::uint64_t seed,
                                  double alpha) {
  validate(lower);
  if (times.empty()) throw Error("domination check needs at least one time");
  if (upper_paths.empty() || replicas == 0) throw Error("domination check needs samples on both sides");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < lower.start_time || (i > 0 && times[i] <= times[i - 1]))
      throw Error("time grid must be increasing and start after the urn start time");
  for (const auto& path : upper_paths)
    if (path.size() != times.size()) throw Error("upper path does not match the time grid");

  std::vector<std::vector<double>> lower_at(times.size(), std::vector<double>(replicas));
  const std::uint64_t horizon = times.back() - lower.start_time;
  detail::parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    const auto path = simulate_urn(lower, horizon, rng);
    for (std::size_t i = 0; i < times.size(); ++i)
      lower_at[i][r] = static_cast<double>(path[times[i] - lower.start_time]);
  });

  const std::vector<double> levels{0.1, 0.25, 0.5, 0.75, 0.9};
  const double eps_l = stats::dkw_epsilon(replicas, alpha);
  const double eps_u = stats::dkw_epsilon(upper_paths.size(), alpha);
  DominationReport rep;
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto& lo = lower_at[i];
    std::vector<double> up;
    up.reserve(upper_paths.size());
    for (const auto& path : upper_paths) up.push_back(static_cast<double>(path[i]));
    std::sort(lo.begin(), lo.end());
    std::sort(up.begin(), up.end());
    QuantileComparison row{times[i], levels, {}, {}, false};
    for (double a : levels) {
      row.lower.push_back(stats::quantile_sorted(lo, a));
      row.upper.push_back(stats::quantile_sorted(up, a));
      // Ordering in law means q_lower(a) <= q_upper(a); allow for sampling error on both sides.
      if (stats::quantile_sorted(lo, a - eps_l) > stats::quantile_sorted(up, a + eps_u)) row.violation = true;
    }
    rep.any_violation = rep.any_violation || row.violation;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace antflow
