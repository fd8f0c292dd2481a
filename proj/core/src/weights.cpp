#include "antflow/weights.hpp"

#include <algorithm>
#include <cmath>

namespace antflow {

bool WeightVector::is_normalized() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

WeightVector WeightVector::scaled(double factor) const {
  WeightVector out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

void validate(const MarkedGraph& g, const WeightVector& w) {
  if (w.size() != g.edge_count())
    throw GraphError("weight vector has " + std::to_string(w.size()) + " entries, graph has " +
                     std::to_string(g.edge_count()) + " edges");
  for (EdgeIndex e = 0; e < w.size(); ++e)
    if (!std::isfinite(w[e]) || w[e] < 0.0)
      throw GraphError("weight of edge '" + g.edge(e).id + "' must be finite and nonnegative");
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace antflow
