#pragma once

#include <span>
#include <vector>

namespace antflow::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> x);

/// Type-7 empirical quantile of `sorted` (ascending).
double quantile_sorted(std::span<const double> sorted, double level);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

/// One-sample Kolmogorov-Smirnov test against Uniform(0,1) with the
/// asymptotic 1% critical value 1.6276 / sqrt(n).
KsResult ks_uniform(std::vector<double> samples);

/// Half-width of the two-sided DKW band at confidence 1 - alpha.
double dkw_epsilon(std::size_t n, double alpha);

}  // namespace antflow::stats
