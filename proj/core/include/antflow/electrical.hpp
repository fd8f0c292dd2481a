#pragma once

#include "antflow/graph.hpp"
#include "antflow/weights.hpp"

namespace antflow {

/// pi_w(x) = sum of the weights of the edges incident to x.
NodeMeasure stationary_measure(const MarkedGraph& g, const WeightVector& w);

/// Effective conductance between s and t with zero-weight edges removed.
/// Returns 0 when s and t are disconnected. Throws GraphError if s == t.
double effective_conductance(const MarkedGraph& g, const WeightVector& w, NodeIndex s, NodeIndex t);

/// Expected number of visits to y, counting time 0 when y == x, of the
/// w-weighted walk from x killed on hitting F.
///
/// Throws DisconnectedError when the walk from x cannot reach F, and
/// GraphError when y is F.
double green_function(const MarkedGraph& g, const WeightVector& w, NodeIndex x, NodeIndex y);

/// pi_w(N) / C(N,F); equals green_function(N, N). Throws DisconnectedError
/// when the conductance is zero.
double returns_to_nest_mean(const MarkedGraph& g, const WeightVector& w);

}  // namespace antflow
