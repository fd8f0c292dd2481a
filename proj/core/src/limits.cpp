#include "antflow/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "antflow/field.hpp"

namespace antflow {

std::string_view to_string(LimitMethod m) {
  switch (m) {
    case LimitMethod::ClosedForm: return "closed-form";
    case LimitMethod::ContractionIteration: return "contraction-iteration";
    case LimitMethod::RootFinding: return "root-finding";
    case LimitMethod::DirichletDistribution: return "dirichlet-distribution";
  }
  return "closed-form";
}

bool LimitPrediction::deterministic_edge(EdgeIndex e) const {
  return std::find(dirichlet_edges.begin(), dirichlet_edges.end(), e) == dirichlet_edges.end();
}

namespace {

void attach_residual(const MarkedGraph& g, LimitPrediction& pred) {
  if (!pred.deterministic()) {
    pred.residual = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  pred.residual = field(g, WeightVector(pred.limit)).sup_drift();
}

LimitPrediction from_canonical_limit(const MarkedGraph& g, GraphFamily fam, const std::vector<double>& c,
                                     LimitMethod method) {
  LimitPrediction pred;
  const auto w = from_canonical(fam, c, g.edge_count());
  pred.limit.assign(w.begin(), w.end());
  pred.family = std::move(fam);
  pred.method = method;
  attach_residual(g, pred);
  return pred;
}

GraphFamily require(const MarkedGraph& g, FamilyTag tag) {
  auto fam = classify(g);
  if (fam.tag != tag)
    throw FamilyError("graph is " + std::string(to_string(fam.tag)) + ", expected " + std::string(to_string(tag)));
  return fam;
}

}  // namespace

LimitPrediction limit_tree_like(const MarkedGraph& g) {
  auto fam = require(g, FamilyTag::TreeLike);
  LimitPrediction pred;
  pred.limit.assign(g.edge_count(), 0.0);
  const std::size_t l = fam.canonical_edges.size();
  if (l == 1) {
    pred.limit[fam.canonical_edges[0]] = 1.0;
    pred.method = LimitMethod::ClosedForm;
  } else {
    pred.method = LimitMethod::DirichletDistribution;
    pred.dirichlet_edges = fam.canonical_edges;
    pred.dirichlet_params.assign(l, 1.0);
    for (EdgeIndex e : fam.canonical_edges) pred.limit[e] = 1.0 / static_cast<double>(l);
  }
  pred.family = std::move(fam);
  attach_residual(g, pred);
  return pred;
}

LimitPrediction limit_cone(const MarkedGraph& g) {
  return from_canonical_limit(g, require(g, FamilyTag::Cone), {1.0, 1.0 / 3.0, 1.0 / 3.0, 0.0},
                              LimitMethod::ClosedForm);
}

LimitPrediction limit_cone() { return limit_cone(make_cone()); }

double f_p(int p, double x) {
  // x^p (1-x) / (1-x^p) = x^p / (1 + x + ... + x^{p-1}); no cancellation near 1.
  double geometric = 0.0, power = 1.0;
  for (int i = 0; i < p; ++i) {
    geometric += power;
    power *= x;
  }
  return 1.0 - power / geometric;
}

ContractionResult contraction_fp(int p, int q) {
  if (std::min(p, q) < 2) throw FamilyError("contraction needs min(p,q) >= 2; (1,q) paths are tree-like");
  ContractionResult r;
  double alpha = 0.5;
  for (r.iterations = 1; r.iterations <= 10000; ++r.iterations) {
    const double next = f_p(q, f_p(p, alpha));
    const double step = std::abs(next - alpha);
    alpha = next;
    if (step < 1e-14) break;
  }
  if (r.iterations > 10000) throw ConvergenceError("contraction iteration did not settle");
  r.alpha = alpha;
  r.beta = f_p(p, alpha);
  const double ap = std::pow(r.alpha, p), bq = std::pow(r.beta, q);
  r.residual_power_system = std::max(std::abs(ap + bq - 1.0), std::abs(ap * (1 - r.alpha) - bq * (1 - r.beta)));
  r.residual_map_system = std::max(std::abs(r.alpha - f_p(q, r.beta)), std::abs(r.beta - f_p(p, r.alpha)));
  return r;
}

LimitPrediction limit_two_paths(const MarkedGraph& g) {
  auto fam = classify(g);
  if (fam.tag == FamilyTag::TreeLike) throw FamilyError("(1,q) paths are tree-like; use the tree-like limit");
  fam = require(g, FamilyTag::TwoPaths);
  const auto cr = contraction_fp(fam.p, fam.q);
  std::vector<double> c;
  for (int k = 1; k <= fam.p; ++k) c.push_back(std::pow(cr.alpha, k));
  for (int l = 1; l <= fam.q; ++l) c.push_back(std::pow(cr.beta, l));
  return from_canonical_limit(g, std::move(fam), c, LimitMethod::ContractionIteration);
}

LimitPrediction limit_two_paths(int p, int q) {
  if (std::min(p, q) < 2) throw FamilyError("(1,q) paths are tree-like; use the tree-like limit");
  return limit_two_paths(make_two_paths(p, q));
}

double SandwichState::gap() const {
  double g = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) g = std::max(g, upper[i] - lower[i]);
  return g;
}

std::vector<double> sandwich_map(int p, int q, const std::vector<double>& u, const std::vector<double>& v) {
  const std::span<const double> us(u), vs(v);
  const double sbq_v = harmonic_sum(vs.subspan(p, q));
  const double sap_v = harmonic_sum(vs.subspan(0, p));
  std::vector<double> out(p + q);
  for (int k = 1; k <= p; ++k) {
    const double s = harmonic_sum(us.subspan(0, k));
    out[k - 1] = s / (s + sbq_v);
  }
  for (int l = 1; l <= q; ++l) {
    const double s = harmonic_sum(us.subspan(p, l));
    out[p + l - 1] = s / (s + sap_v);
  }
  return out;
}

std::vector<SandwichState> sandwich_iteration(int p, int q, double u0, int n_max, double gap_tol) {
  const auto cr = contraction_fp(p, q);
  const double bound = std::min({1.0 - 1.0 / p, 1.0 - 1.0 / q, cr.alpha, cr.beta});
  if (!(u0 > 0.0 && u0 < bound)) throw Error("u0 must lie in (0, " + std::to_string(bound) + ")");

  SandwichState s;
  for (int k = 1; k <= p; ++k) s.lower.push_back(std::pow(u0, k));
  for (int l = 1; l <= q; ++l) s.lower.push_back(std::pow(u0, l));
  s.upper.assign(p + q, 1.0);
  std::vector<SandwichState> out{s};

  const double slack = 4 * std::numeric_limits<double>::epsilon();
  for (int n = 1; n <= n_max && out.back().gap() >= gap_tol; ++n) {
    const auto& prev = out.back();
    SandwichState next;
    next.iteration = n;
    next.lower = sandwich_map(p, q, prev.lower, prev.upper);
    next.upper = sandwich_map(p, q, prev.upper, prev.lower);
    for (int i = 0; i < p + q; ++i) {
      // The first step must move strictly; later steps may stall at rounding level.
      const double tol = n == 1 ? 0.0 : slack;
      if (next.lower[i] <= prev.lower[i] - tol || (n == 1 && next.lower[i] == prev.lower[i]))
        throw ConvergenceError("lower envelope failed to increase at iteration " + std::to_string(n));
      if (next.upper[i] >= prev.upper[i] + tol || (n == 1 && next.upper[i] == prev.upper[i]))
        throw ConvergenceError("upper envelope failed to decrease at iteration " + std::to_string(n));
      if (next.lower[i] > next.upper[i] + slack)
        throw ConvergenceError("lower envelope crossed the upper one at iteration " + std::to_string(n));
    }
    out.push_back(std::move(next));
  }
  return out;
}

double losange_cubic(double x) { return ((2.0 * x + 4.0) * x - 2.0) * x - 1.5; }

double losange_root() {
  // Negative at 0, positive at 1, single sign change on [0,1].
  double lo = 0.0, hi = 1.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (losange_cubic(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(losange_cubic(lo)) <= std::abs(losange_cubic(hi)) ? lo : hi;
}

LimitPrediction limit_losange(const MarkedGraph& g) {
  const double w = losange_root();
  return from_canonical_limit(g, require(g, FamilyTag::Losange), {w, 0.5, 0.5, w, 0.5}, LimitMethod::RootFinding);
}

LimitPrediction limit_losange() { return limit_losange(make_losange()); }

LimitPrediction predict_limit(const MarkedGraph& g) {
  switch (classify(g).tag) {
    case FamilyTag::TreeLike: return limit_tree_like(g);
    case FamilyTag::Cone: return limit_cone(g);
    case FamilyTag::TwoPaths: return limit_two_paths(g);
    case FamilyTag::Losange: return limit_losange(g);
    case FamilyTag::General: break;
  }
  throw FamilyError("no limit is known for general graphs");
}

}  // namespace antflow
