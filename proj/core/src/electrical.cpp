#include "antflow/electrical.hpp"

#include "dense_solve.hpp"

namespace antflow {
namespace {

// Nodes reachable from `from` through positive-weight edges, never stepping
// out of `stop` (which is marked reachable but not expanded).
std::vector<char> positive_reach(const MarkedGraph& g, const WeightVector& w, NodeIndex from,
                                 std::optional<NodeIndex> stop) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeIndex> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const NodeIndex x = stack.back();
    stack.pop_back();
    if (stop && x == *stop) continue;
    for (EdgeIndex e : g.incident(x)) {
      if (w[e] <= 0.0) continue;
      const NodeIndex y = g.edge(e).other(x);
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

}  // namespace

NodeMeasure stationary_measure(const MarkedGraph& g, const WeightVector& w) {
  validate(g, w);
  NodeMeasure pi(g.node_count(), 0.0);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    pi[g.edge(e).u] += w[e];
    pi[g.edge(e).v] += w[e];
  }
  return pi;
}

double effective_conductance(const MarkedGraph& g, const WeightVector& w, NodeIndex s, NodeIndex t) {
  validate(g, w);
  if (s == t) throw GraphError("conductance endpoints must differ");
  const auto reach = positive_reach(g, w, s, std::nullopt);
  if (!reach[t]) return 0.0;

  // Unknown potentials on the reachable interior; phi(s) = 1, phi(t) = 0.
  std::vector<long> slot(g.node_count(), -1);
  long n = 0;
  for (NodeIndex x = 0; x < g.node_count(); ++x)
    if (reach[x] && x != s && x != t) slot[x] = n++;

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const double c = w[e];
    if (c <= 0.0) continue;
    const Edge& ed = g.edge(e);
    for (auto [a, b] : {std::pair{ed.u, ed.v}, std::pair{ed.v, ed.u}}) {
      if (slot[a] < 0) continue;
      lap(slot[a], slot[a]) += c;
      if (slot[b] >= 0) lap(slot[a], slot[b]) -= c;
      else if (b == s) rhs(slot[a]) += c;
    }
  }
  const Eigen::VectorXd phi = detail::solve_dense(lap, rhs);

  double current = 0.0;
  for (EdgeIndex e : g.incident(s)) {
    if (w[e] <= 0.0) continue;
    const NodeIndex y = g.edge(e).other(s);
    const double py = y == t ? 0.0 : phi(slot[y]);
    current += w[e] * (1.0 - py);
  }
  return current;
}

double green_function(const MarkedGraph& g, const WeightVector& w, NodeIndex x, NodeIndex y) {
  validate(g, w);
  const NodeIndex f = g.food();
  if (y == f) throw GraphError("green function is not defined at the food node");
  if (x == f) return 0.0;

  const auto reach = positive_reach(g, w, x, f);
  if (!reach[f]) throw DisconnectedError("food is not reachable from node '" + g.node_name(x) + "'");
  if (!reach[y]) return 0.0;

  const auto pi = stationary_measure(g, w);
  std::vector<long> slot(g.node_count(), -1);
  long n = 0;
  for (NodeIndex v = 0; v < g.node_count(); ++v)
    if (reach[v] && v != f) slot[v] = n++;

  // (I - Q) h = e_y; then h(x) = G(x, y).
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (slot[v] < 0) continue;
    for (EdgeIndex e : g.incident(v)) {
      const NodeIndex u = g.edge(e).other(v);
      if (w[e] > 0.0 && slot[u] >= 0) a(slot[v], slot[u]) -= w[e] / pi[v];
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(slot[y]) = 1.0;
  return detail::solve_dense(a, rhs)(slot[x]);
}

double returns_to_nest_mean(const MarkedGraph& g, const WeightVector& w) {
  const double c = effective_conductance(g, w, g.nest(), g.food());
  if (c <= 0.0) throw DisconnectedError("zero conductance between nest and food");
  return stationary_measure(g, w)[g.nest()] / c;
}

}  // namespace antflow
