#include "antflow/field.hpp"

#include <algorithm>
#include <cmath>

#include "antflow/electrical.hpp"
#include "dense_solve.hpp"
#include "lp_feasibility.hpp"

namespace antflow {

double FieldEvaluation::sup_drift() const {
  double s = 0.0;
  for (double v : F) s = std::max(s, std::abs(v));
  return s;
}

namespace {

// Nodes other than F that the walk from N can visit through positive weights.
std::vector<long> transient_slots(const MarkedGraph& g, const WeightVector& w, long& n) {
  std::vector<long> slot(g.node_count(), -1);
  std::vector<NodeIndex> stack{g.nest()};
  bool hits_food = false;
  n = 0;
  slot[g.nest()] = n++;
  while (!stack.empty()) {
    const NodeIndex x = stack.back();
    stack.pop_back();
    for (EdgeIndex e : g.incident(x)) {
      if (w[e] <= 0.0) continue;
      const NodeIndex y = g.edge(e).other(x);
      if (y == g.food()) {
        hits_food = true;
      } else if (slot[y] < 0) {
        slot[y] = n++;
        stack.push_back(y);
      }
    }
  }
  if (!hits_food) throw DisconnectedError("food is not reachable from nest through positive weights");
  return slot;
}

double trace_probability_with(const MarkedGraph& g, const WeightVector& w, const NodeMeasure& pi,
                              const std::vector<long>& slot, long n, EdgeIndex target) {
  if (w[target] <= 0.0) return 0.0;
  // p(x) = P(cross target before F | start x). Crossing the target ends in
  // success, so the walk only continues along the other edges.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (NodeIndex x = 0; x < g.node_count(); ++x) {
    const long i = slot[x];
    if (i < 0) continue;
    a(i, i) = pi[x];
    for (EdgeIndex e : g.incident(x)) {
      if (w[e] <= 0.0) continue;
      if (e == target) {
        b(i) += w[e];
        continue;
      }
      const NodeIndex y = g.edge(e).other(x);
      if (y != g.food()) a(i, slot[y]) -= w[e];
    }
  }
  const double p = detail::solve_dense(a, b)(slot[g.nest()]);
  return std::clamp(p, 0.0, 1.0);
}

double safe_ratio(double num, double den) {
  if (den == 0.0) throw FamilyError("degenerate closed-form denominator");
  return num / den;
}

}  // namespace

double exact_trace_probability(const MarkedGraph& g, const WeightVector& w, EdgeIndex e) {
  validate(g, w);
  if (e >= g.edge_count()) throw GraphError("edge index out of range");
  long n = 0;
  const auto slot = transient_slots(g, w, n);
  return trace_probability_with(g, w, stationary_measure(g, w), slot, n, e);
}

FieldEvaluation field(const MarkedGraph& g, const WeightVector& w) {
  validate(g, w);
  long n = 0;
  const auto slot = transient_slots(g, w, n);
  const auto pi = stationary_measure(g, w);
  FieldEvaluation out{WeightVector::filled(g.edge_count(), 0.0), WeightVector::filled(g.edge_count(), 0.0)};
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    out.p[e] = trace_probability_with(g, w, pi, slot, n, e);
    out.F[e] = out.p[e] - w[e];
  }
  return out;
}

double harmonic_sum(std::span<const double> w) {
  if (w.empty()) return 0.0;
  double inv = 0.0;
  for (double v : w) {
    if (v <= 0.0) return 0.0;
    inv += 1.0 / v;
  }
  return 1.0 / inv;
}

namespace {

FieldEvaluation with_drift(std::vector<double> p, std::span<const double> w) {
  FieldEvaluation out{WeightVector(std::move(p)), WeightVector::filled(w.size(), 0.0)};
  for (std::size_t i = 0; i < w.size(); ++i) out.F[i] = out.p[i] - w[i];
  return out;
}

}  // namespace

FieldEvaluation closed_form_cone(std::span<const double> w) {
  if (w.size() != 4) throw FamilyError("cone field needs 4 weights");
  const double w1 = w[0], w2 = w[1], w3 = w[2], w4 = w[3];
  const double a_side = w2 + w3 + w4;
  // Conductance N -> F avoiding the direct edge: (w2 + w3) in series with w4.
  const double c_side = a_side > 0.0 ? (w2 + w3) * w4 / a_side : 0.0;
  const double p1 = safe_ratio(w1, w1 + c_side);
  const double s1 = (w1 + w2 + w3) * a_side;
  const double p2 = safe_ratio(w2 * (w2 + 2 * w3 + w4), s1 - w3 * w3);
  const double p3 = safe_ratio(w3 * (w3 + 2 * w2 + w4), s1 - w2 * w2);
  return with_drift({p1, p2, p3, 1.0 - p1}, w);
}

bool cone_f2_positive(double w2, double w3) { return w3 * (1.0 - 2.0 * w2) > w2 * w2; }

FieldEvaluation closed_form_two_paths(int p, int q, std::span<const double> w) {
  if (p < 1 || q < 1 || w.size() != static_cast<std::size_t>(p + q))
    throw FamilyError("two-paths field needs p + q weights");
  const auto a = w.subspan(0, p);
  const auto b = w.subspan(p, q);
  const double sa_full = harmonic_sum(a);
  const double sb_full = harmonic_sum(b);
  std::vector<double> out(w.size());
  auto share = [](double mine, double other) {
    return mine + other > 0.0 ? mine / (mine + other) : 0.0;
  };
  for (int k = 1; k <= p; ++k) out[k - 1] = share(harmonic_sum(a.first(k)), sb_full);
  for (int l = 1; l <= q; ++l) out[p + l - 1] = share(harmonic_sum(b.first(l)), sa_full);
  return with_drift(std::move(out), w);
}

namespace {

struct LosangeParts {
  double p1, p2, p3;
};

LosangeParts losange_parts(double w1, double w2, double w3, double w4, double w5) {
  const double s = w1 + w4;
  const double a = w1 + w2 + w3;
  const double b = w3 + w4 + w5;
  const double h = w1 * w4 / s;

  const double p15 = safe_ratio(w1 * w4 / (s * b) + (a > 0 ? w1 * w3 / (a * b) : 0.0),
                                1.0 - w4 * w4 / (s * b) - (a > 0 ? w3 * w3 / (a * b) : 0.0));
  const double p1 = w1 / s + (w4 / s) * p15;
  const double p2 = safe_ratio(w2 * (w1 * (w3 + w4 + w5) + w3 * w4), s * (w3 + w2 * w5 + h));
  const double l1 = w1 > 0 ? w1 / a : 0.0;
  const double l4 = w4 > 0 ? w4 / b : 0.0;
  const double p3 = safe_ratio(w3 * (l1 + l4), s - w1 * l1 - w4 * l4);
  return {p1, p2, p3};
}

}  // namespace

LosangeField closed_form_losange(std::span<const double> w) {
  if (w.size() != 5) throw FamilyError("losange field needs 5 weights");
  const double w1 = w[0], w2 = w[1], w3 = w[2], w4 = w[3], w5 = w[4];
  if (w1 + w4 <= 0.0) throw FamilyError("losange field needs w1 + w4 > 0");
  const auto direct = losange_parts(w1, w2, w3, w4, w5);
  const auto mirror = losange_parts(w4, w5, w3, w1, w2);

  LosangeField out;
  out.eval = with_drift({direct.p1, direct.p2, direct.p3, mirror.p1, mirror.p2}, w);
  const double h = w1 * w4 / (w1 + w4);
  out.f2_factored = safe_ratio(w2 * w5 * (w1 / (w1 + w4) - w2), w3 + w2 * w5 + h);
  out.lambda1 = w1 > 0 ? w1 / (w1 + w2 + w3) : 0.0;
  out.lambda4 = w4 > 0 ? w4 / (w3 + w4 + w5) : 0.0;
  return out;
}

std::vector<double> to_canonical(const GraphFamily& family, const WeightVector& w) {
  std::vector<double> out;
  out.reserve(family.canonical_edges.size());
  for (EdgeIndex e : family.canonical_edges) out.push_back(w.at(e));
  return out;
}

WeightVector from_canonical(const GraphFamily& family, std::span<const double> canonical,
                            std::size_t edge_count) {
  if (canonical.size() != family.canonical_edges.size())
    throw FamilyError("canonical vector has the wrong length");
  auto w = WeightVector::filled(edge_count, 0.0);
  for (std::size_t i = 0; i < canonical.size(); ++i) w[family.canonical_edges[i]] = canonical[i];
  return w;
}

bool in_some_E_i(const MarkedGraph& g, const PathCatalog& catalog,
                 std::span<const std::uint64_t> counts, std::uint64_t denominator) {
  if (counts.size() != g.edge_count()) throw GraphError("count vector does not match graph");
  for (auto c : counts)
    if (c > denominator) return false;
  std::uint64_t nest_mass = 0;
  for (EdgeIndex e : g.incident(g.nest())) nest_mass += counts[e];
  if (nest_mass < denominator) return false;
  const std::uint64_t paths = catalog.count;
  return std::any_of(catalog.paths.begin(), catalog.paths.end(), [&](const auto& path) {
    return std::all_of(path.begin(), path.end(),
                       [&](EdgeIndex e) { return counts[e] * paths >= denominator; });
  });
}

bool membership_E(const MarkedGraph& g, const PathCatalog& catalog, const WeightVector& w, double slack) {
  validate(g, w);
  const std::size_t m = g.edge_count();
  const double floor = 1.0 / static_cast<double>(catalog.count);
  for (double v : w)
    if (v > 1.0 + slack) return false;
  double nest_mass = 0.0;
  for (EdgeIndex e : g.incident(g.nest())) nest_mass += w[e];
  // Every point of every E_i has pi(N) >= 1, and that is preserved by convex combinations.
  if (nest_mass < 1.0 - slack) return false;
  for (const auto& path : catalog.paths)
    if (std::all_of(path.begin(), path.end(), [&](EdgeIndex e) { return w[e] >= floor - slack; }))
      return true;

  // w = sum_i y_i with y_i in lambda_i * E_i, sum_i lambda_i = 1.
  // Variables: per path i, lambda_i then y_{i,e} for every edge.
  const std::size_t k = catalog.count;
  const std::size_t stride = m + 1;
  const std::size_t nvars = k * stride;
  std::vector<detail::LpRow> rows;
  auto blank = [&] { return detail::LpRow{std::vector<double>(nvars, 0.0), 0.0, 'L'}; };
  for (EdgeIndex e = 0; e < m; ++e) {
    auto r = blank();
    for (std::size_t i = 0; i < k; ++i) r.a[i * stride + 1 + e] = 1.0;
    r.b = w[e];
    r.sense = 'E';
    rows.push_back(std::move(r));
  }
  {
    auto r = blank();
    for (std::size_t i = 0; i < k; ++i) r.a[i * stride] = 1.0;
    r.b = 1.0;
    r.sense = 'E';
    rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t lam = i * stride;
    std::vector<char> on_path(m, 0);
    for (EdgeIndex e : catalog.paths[i]) on_path[e] = 1;
    for (EdgeIndex e = 0; e < m; ++e) {
      auto upper = blank();
      upper.a[lam + 1 + e] = 1.0;
      upper.a[lam] = -1.0;
      rows.push_back(std::move(upper));
      if (on_path[e]) {
        auto lower = blank();
        lower.a[lam] = floor;
        lower.a[lam + 1 + e] = -1.0;
        lower.b = slack;
        rows.push_back(std::move(lower));
      }
    }
    auto nest = blank();
    nest.a[lam] = 1.0;
    for (EdgeIndex e : g.incident(g.nest())) nest.a[lam + 1 + e] -= 1.0;
    nest.b = slack;
    rows.push_back(std::move(nest));
  }
  return detail::lp_feasible(std::move(rows), nvars);
}

double lipschitz_bound(const MarkedGraph& g, const PathCatalog& catalog) {
  const double s = static_cast<double>(catalog.count);
  return 1.0 + 2.0 * (1.0 + static_cast<double>(g.degree(g.nest())) *
                                static_cast<double>(catalog.max_length) * s * s);
}

}  // namespace antflow
