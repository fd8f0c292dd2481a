#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "antflow/rng.hpp"

namespace antflow {

using UrnFunction = std::function<double(double)>;

/// Piecewise-linear interpolation through (x_i, y_i), x strictly increasing.
/// Constant extrapolation outside [x_0, x_last].
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> x, std::vector<double> y);
  static TabulatedFunction sample(const UrnFunction& f, std::size_t points);

  double operator()(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

namespace urn_functions {
UrnFunction polya();
/// x / (x + 1/q)
UrnFunction ratio(double q);
/// x / (x + 1 - eps)
UrnFunction shifted(double eps);
/// x / (x + k (1-x) / (k + 1 - x)): lower bound for a direct nest-food edge
/// when k other edges leave the nest.
UrnFunction distance_one_bound(double k);
UrnFunction constant(double c);
}  // namespace urn_functions

/// P(X_{n+1} = X_n + 1 | past) = G(X_n / (n + 2)), started from
/// X_{start_time} = start_value.
struct UrnSpec {
  UrnFunction G;
  std::uint64_t start_value = 1;
  std::uint64_t start_time = 0;
};

/// Throws Error when the start is inconsistent or G leaves [0,1] on a grid.
void validate(const UrnSpec& spec);

/// X at times start_time, ..., start_time + n_steps.
std::vector<std::uint64_t> simulate_urn(const UrnSpec& spec, std::uint64_t n_steps, Rng& rng);

/// Final normalized values X_n/(n+2) of `replicas` independent runs; replica r
/// uses stream r of `seed`.
std::vector<double> urn_final_values(const UrnSpec& spec, std::uint64_t n_steps, std::size_t replicas,
                                     std::uint64_t seed);

/// Points p with |G(p) - p| < tol (grid points, plus bisection on sign
/// changes between them) whose central-difference slope is <= 1 + tol.
std::vector<double> stable_fixed_points(const UrnFunction& G, std::span<const double> grid, double tol = 1e-9);
std::vector<double> uniform_grid(std::size_t points);

struct QuantileComparison {
  std::uint64_t time = 0;
  std::vector<double> levels;
  std::vector<double> lower;
  std::vector<double> upper;
  bool violation = false;
};

struct DominationReport {
  std::vector<QuantileComparison> rows;
  bool any_violation = false;
};

/// Compares the law of `upper_paths` (values of some process at `times`,
/// one vector per replica) with `replicas` simulated runs of the `lower` urn.
/// A violation is flagged when a lower quantile exceeds the matching upper
/// quantile by more than the two-sided DKW band at level `alpha`.
/// Throws Error when a path does not match the time grid.
DominationReport domination_check(const UrnSpec& lower, std::span<const std::vector<std::uint64_t>> upper_paths,
                                  std::span<const std::uint64_t> times, std::size_t replicas, std::uint64_t seed,
                                  double alpha = 0.01);

}  // namespace antflow
