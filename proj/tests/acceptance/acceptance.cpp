// Acceptance battery. Each criterion prints one PASS/FAIL line; run with a
// criterion number to execute only that one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "antflow/field.hpp"
#include "antflow/flow.hpp"
#include "antflow/harness.hpp"
#include "antflow/limits.hpp"
#include "antflow/stats.hpp"
#include "antflow/urn.hpp"
#include "antflow/walk.hpp"
#include "oracles.hpp"

using namespace antflow;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr std::uint64_t kAnts = 1'000'000;
constexpr std::size_t kReplicas = 20;
constexpr double kMcTol = 0.02;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::vector<double> mean_final(const MarkedGraph& g) {
  ExperimentConfig cfg(g);
  cfg.n_ants = kAnts;
  cfg.replicas = kReplicas;
  cfg.seed = kSeed;
  cfg.schedule = {kAnts};
  return run_experiment(cfg).mean;
}

double sup_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Root of 2x^3 + 4x^2 - 2x - 3/2 on [0,1], by plain bisection.
double oracle_losange_root() {
  auto f = [](double x) { return 2 * x * x * x + 4 * x * x - 2 * x - 1.5; };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// alpha^p + beta^q = 1 and alpha^p (1 - alpha) = beta^q (1 - beta), solved by
// bisection on alpha with beta = (1 - alpha^p)^(1/q).
std::pair<double, double> oracle_two_paths(int p, int q) {
  auto beta_of = [&](double a) { return std::pow(1.0 - std::pow(a, p), 1.0 / q); };
  auto g = [&](double a) {
    const double b = beta_of(a);
    return std::pow(a, p) * (1 - a) - (1 - std::pow(a, p)) * (1 - b);
  };
  double lo = 1e-9, hi = 1 - 1e-12;
  const bool rising = g(lo) < 0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((g(mid) < 0) == rising ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  return {a, beta_of(a)};
}

// Cone: (1, 1/3, 1/3, 0).
Outcome criterion_cone() {
  Outcome o;
  const auto g = make_cone();
  const auto m = mean_final(g);
  const std::vector<double> target{1.0, 1.0 / 3, 1.0 / 3, 0.0};
  const double d = sup_dev(m, target);
  o.require(d <= kMcTol, "sup |mean - (1,1/3,1/3,0)| = " + num(d) + " (tol 0.02); mean = (" + num(m[0]) + ", " +
                             num(m[1]) + ", " + num(m[2]) + ", " + num(m[3]) + ")");
  return o;
}

Outcome criterion_losange() {
  Outcome o;
  const double w = oracle_losange_root();
  const double lib = losange_root();
  const double residual = std::abs(2 * lib * lib * lib + 4 * lib * lib - 2 * lib - 1.5);
  o.require(residual < 1e-14, "cubic residual at the root " + num(residual));
  o.require(std::abs(lib - w) < 1e-14, "library root " + num(lib, 17) + " vs bisection " + num(w, 17));
  const auto m = mean_final(make_losange());
  const double d = sup_dev(m, {w, 0.5, 0.5, w, 0.5});
  o.require(d <= kMcTol, "sup deviation from (w*,1/2,1/2,w*,1/2) = " + num(d) + " (tol 0.02)");
  return o;
}

Outcome criterion_two_paths() {
  Outcome o;
  for (auto [p, q] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    auto [alpha, beta] = oracle_two_paths(p, q);
    if (p == 2 && q == 2) {
      o.require(std::abs(alpha - std::pow(2.0, -0.5)) < 1e-12 && std::abs(beta - std::pow(2.0, -0.5)) < 1e-12,
                "(2,2) oracle equals 2^{-1/2}");
      alpha = beta = std::pow(2.0, -0.5);
    }
    const auto g = make_two_paths(p, q);
    const auto ce = classify(g).canonical_edges;
    const auto m = mean_final(g);
    double d = 0.0;
    for (int k = 1; k <= p; ++k) d = std::max(d, std::abs(m[ce[k - 1]] - std::pow(alpha, k)));
    for (int l = 1; l <= q; ++l) d = std::max(d, std::abs(m[ce[p + l - 1]] - std::pow(beta, l)));
    o.require(d <= kMcTol, "(" + std::to_string(p) + "," + std::to_string(q) + ") deviation " + num(d));
  }
  return o;
}

Outcome criterion_tree_like() {
  Outcome o;
  for (int depth = 2; depth <= 4; ++depth) {
    Rng rng(kSeed + depth, 0);
    const auto g = make_random_tree_like(depth, rng);
    const auto fam = classify(g);
    o.require(fam.tag == FamilyTag::TreeLike && fam.nest_food_multiplicity == 1,
              "depth " + std::to_string(depth) + " graph is tree-like with one direct edge");
    const auto direct = *g.find_edge("a");
    const auto m = mean_final(g);
    double others = 0.0;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e)
      if (e != direct) others = std::max(others, m[e]);
    o.require(m[direct] >= 0.97 && others <= 0.03, "depth " + std::to_string(depth) + " (" +
                                                       std::to_string(g.edge_count()) + " edges): W_a/n = " +
                                                       num(m[direct]) + ", max other = " + num(others));
  }
  return o;
}

Outcome criterion_distance_one() {
  Outcome o;
  const auto m = mean_final(make_cone());
  o.require(m[3] <= 0.02, "W4/n = " + num(m[3]) + " (need <= 0.02)");
  o.require(std::abs(m[1] - 1.0 / 3) <= kMcTol && std::abs(m[2] - 1.0 / 3) <= kMcTol,
            "W2/n = " + num(m[1]) + ", W3/n = " + num(m[2]) + " near 1/3");
  return o;
}

Outcome criterion_oracle_equivalence() {
  Outcome o;
  Rng rng(kSeed, 6);
  auto compare = [&](const MarkedGraph& g, const std::function<std::vector<double>()>& draw,
                     const std::function<WeightVector(const std::vector<double>&)>& closed, const std::string& name) {
    double worst = 0.0, worst_oracle = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto w = draw();
      const auto general = field(g, WeightVector(w)).p;
      worst = std::max(worst, sup_distance(closed(w).values(), general.values()));
      if (i < 25)
        for (EdgeIndex e = 0; e < g.edge_count(); ++e)
          worst_oracle = std::max(worst_oracle, std::abs(general[e] - oracle::trace_probability(g, WeightVector(w), e)));
    }
    o.require(worst < 1e-10, name + " closed vs solver " + num(worst, 3));
    o.require(worst_oracle < 1e-10, name + " solver vs mass propagation " + num(worst_oracle, 3));
  };

  // Points of the E' regions: full support, unit pairs where the family has one.
  compare(
      make_cone(),
      [&] {
        const double w1 = rng.uniform(0.01, 1);
        return std::vector<double>{w1, rng.uniform(0.01, 1), rng.uniform(0.01, 1), 1 - w1};
      },
      [](const std::vector<double>& w) { return closed_form_cone(w).p; }, "cone");
  for (auto [p, q] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    compare(
        make_two_paths(p, q),
        [&, p = p, q = q] {
          std::vector<double> w(p + q);
          for (auto& x : w) x = rng.uniform(0.01, 1);
          w[p - 1] = rng.uniform(0.01, 0.99);
          w[p + q - 1] = 1 - w[p - 1];
          return w;
        },
        [p = p, q = q](const std::vector<double>& w) { return closed_form_two_paths(p, q, w).p; },
        "two-paths(" + std::to_string(p) + "," + std::to_string(q) + ")");
  }
  compare(
      make_losange(),
      [&] {
        const double w2 = rng.uniform(0.01, 0.99);
        return std::vector<double>{rng.uniform(0.01, 1), w2, rng.uniform(0, 1), rng.uniform(0.01, 1), 1 - w2};
      },
      [](const std::vector<double>& w) { return closed_form_losange(w).eval.p; }, "losange");

  // The losange expressions written out by hand.
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double w1 = rng.uniform(0.01, 1), w2 = rng.uniform(0.01, 0.99), w3 = rng.uniform(0, 1),
                 w4 = rng.uniform(0.01, 1), w5 = 1 - w2;
    const double s = w1 + w4;
    const double A = w1 + w2 + w3, B = w3 + w4 + w5;
    const double p15 = (w1 * w4 / (s * B) + w1 * w3 / (A * B)) / (1 - w4 * w4 / (s * B) - w3 * w3 / (A * B));
    const double p1 = w1 / s + (w4 / s) * p15;
    const double p2 =
        w2 * (w1 * (w3 + w4 + w5) + w3 * w4) / ((w1 + w4) * (w3 + w2 * w5 + w1 * w4 / (w1 + w4)));
    const auto lf = closed_form_losange(std::vector<double>{w1, w2, w3, w4, w5});
    const double l1 = lf.lambda1, l4 = lf.lambda4;
    const double p3 = w3 * (l1 + l4) / (s - w1 * l1 - w4 * l4);
    const double f2 = w2 * w5 * (w1 / (w1 + w4) - w2) / (w3 + w2 * w5 + w1 * w4 / (w1 + w4));
    const auto gen = field(make_losange(), WeightVector{w1, w2, w3, w4, w5}).p;
    worst = std::max({worst, std::abs(p1 - gen[0]), std::abs(p2 - gen[1]), std::abs(p3 - gen[2]),
                      std::abs(f2 - (gen[1] - w2))});
  }
  o.require(worst < 1e-10, "written-out losange formulas vs solver " + num(worst, 3));
  return o;
}

Outcome criterion_fixed_point_residuals() {
  Outcome o;
  std::vector<MarkedGraph> graphs{make_single_edge(), make_two_paths(1, 2), make_two_paths(1, 4), make_cone(),
                                  make_losange(),     make_two_paths(2, 2), make_two_paths(2, 3), make_two_paths(3, 3),
                                  make_two_paths(2, 5), make_two_paths(4, 7)};
  for (int depth = 2; depth <= 4; ++depth) {
    Rng rng(kSeed + depth, 0);
    graphs.push_back(make_random_tree_like(depth, rng));
  }
  double worst = 0.0;
  int checked = 0;
  for (const auto& g : graphs) {
    const auto pred = predict_limit(g);
    if (!pred.deterministic()) continue;
    worst = std::max(worst, field(g, WeightVector(pred.limit)).sup_drift());
    ++checked;
  }
  o.require(worst < 1e-10, std::to_string(checked) + " limits, max |F| = " + num(worst, 3));
  return o;
}

Outcome criterion_ode() {
  Outcome o;
  Rng rng(kSeed, 8);
  std::vector<MarkedGraph> graphs{make_cone(), make_losange(), make_two_paths(2, 2), make_two_paths(2, 3),
                                  make_two_paths(3, 3)};
  for (const auto& g : graphs) {
    const auto fam = classify(g);
    const auto target = predict_limit(g).limit;
    const auto sys = make_flow_system(g);
    double worst = 0.0, worst_h_rise = 0.0, worst_h_end = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto traj = integrate(sys, sample_attraction_region(g, fam, rng));
      worst = std::max(worst, sup_distance(traj.final_state(), target));
      if (fam.is(FamilyTag::Losange)) {
        const auto h = lyapunov_trace_losange(traj);
        for (std::size_t k = 1; k < h.size(); ++k) worst_h_rise = std::max(worst_h_rise, h[k] - h[k - 1]);
        worst_h_end = std::max(worst_h_end, h.back());
      }
    }
    const std::string name(to_string(fam.tag));
    o.require(worst < 1e-6, name + " max distance " + num(worst, 3));
    if (fam.is(FamilyTag::Losange)) {
      o.require(worst_h_rise <= 0.0, "losange h never increases (max step " + num(worst_h_rise, 3) + ")");
      o.require(worst_h_end < 1e-8, "losange final h " + num(worst_h_end, 3));
    }
  }
  return o;
}

Outcome criterion_contraction() {
  Outcome o;
  double worst = 0.0;
  for (int p = 2; p <= 10; ++p)
    for (int i = 0; i <= 10000; ++i) {
      // Quotient rule on f_p(x) = 1 - x^p / (1 + x + ... + x^{p-1}).
      const double x = i / 10000.0;
      double s = 0.0, ds = 0.0;
      for (int k = 0; k < p; ++k) {
        s += std::pow(x, k);
        if (k > 0) ds += k * std::pow(x, k - 1);
      }
      const double num_ = std::pow(x, p), dnum = p * std::pow(x, p - 1);
      const double deriv = -(dnum * s - num_ * ds) / (s * s);
      worst = std::max(worst, std::abs(deriv));
      const double h = 1e-7, lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
      const double fd = (f_p(p, hi) - f_p(p, lo)) / (hi - lo);
      if (std::abs(fd - deriv) > 1e-5) o.require(false, "f_p derivative mismatch at p=" + std::to_string(p));
    }
  o.require(worst < 1.0, "sup |f_p'| over p = 2..10 = " + num(worst, 6));

  for (auto [p, q] : {std::pair{2, 2}, {2, 3}}) {
    const auto s = sandwich_iteration(p, q);
    bool monotone = true;
    for (std::size_t n = 1; n < s.size(); ++n)
      for (std::size_t i = 0; i < s[n].lower.size(); ++i) {
        monotone = monotone && s[n].lower[i] >= s[n - 1].lower[i] && s[n].upper[i] <= s[n - 1].upper[i];
        monotone = monotone && s[n].lower[i] <= s[n].upper[i];
      }
    const std::string name = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    o.require(monotone, name + " envelopes monotone over " + std::to_string(s.size() - 1) + " steps");
    o.require(s.back().gap() < 1e-10, name + " terminal gap " + num(s.back().gap(), 3));
  }
  return o;
}

Outcome criterion_urn() {
  Outcome o;
  const auto polya = urn_final_values({urn_functions::polya()}, 10000, 10000, kSeed);
  const auto ks = stats::ks_uniform(polya);
  o.require(ks.pass, "Polya KS " + num(ks.statistic) + " vs 1% critical " + num(ks.critical));

  const auto ratio = urn_final_values({urn_functions::ratio(2.0)}, 1'000'000, 100, kSeed + 1);
  double worst = 0.0;
  for (double x : ratio) worst = std::max(worst, std::abs(x - 0.5));
  o.require(worst <= 0.02, "x/(x+1/2) urn: max |X - 0.5| over 100 runs = " + num(worst));

  const auto fp = stable_fixed_points(urn_functions::ratio(2.0), uniform_grid(1001));
  o.require(fp.size() == 1 && std::abs(fp[0] - 0.5) < 1e-12,
            "stable fixed points = {" + (fp.empty() ? std::string() : num(fp[0], 12)) + "} (" +
                std::to_string(fp.size()) + " found)");
  return o;
}

Outcome criterion_invariants() {
  Outcome o;
  const std::uint64_t n = 100000;
  for (const auto& g : {make_cone(), make_losange(), make_two_paths(2, 3)}) {
    const auto fam = classify(g);
    const auto cat = enumerate_paths(g);
    const std::string name(to_string(fam.tag));
    std::uint64_t bad_e = 0, bad_trace = 0, bad_conservation = 0;
    double worst_p25 = 0.0;
    ProcessOptions opts;
    opts.keep_traces = true;
    opts.observer = [&](std::uint64_t k, std::span<const std::uint64_t> w, const TraceRecord& t) {
      bad_e += !in_some_E_i(g, cat, w, k + 1);
      bad_trace += !trace_is_connected(g, t.crossed);
      if (fam.is(FamilyTag::TwoPaths))
        bad_conservation += w[fam.canonical_edges[fam.p - 1]] + w[fam.canonical_edges.back()] != k + 2;
      if (fam.is(FamilyTag::Losange) && k % 100 == 0) {
        std::vector<double> x(w.size());
        for (std::size_t e = 0; e < w.size(); ++e) x[e] = double(w[e]) / double(k + 1);
        const auto p = field(g, WeightVector(x)).p;
        worst_p25 = std::max(worst_p25, std::abs(p[fam.canonical_edges[1]] + p[fam.canonical_edges[4]] - 1));
      }
    };
    const auto run = run_process(g, n, kSeed, 11, opts);
    o.require(bad_e == 0, name + " E-membership violations " + std::to_string(bad_e));
    o.require(bad_trace == 0, name + " disconnected traces " + std::to_string(bad_trace));
    if (fam.is(FamilyTag::TwoPaths)) o.require(bad_conservation == 0, name + " conservation violations " + std::to_string(bad_conservation));
    if (fam.is(FamilyTag::Losange)) o.require(worst_p25 < 1e-12, name + " |p2 + p5 - 1| " + num(worst_p25, 3));

    const auto rep = martingale_residuals(g, run.traces, [&](const WeightVector& w) {
      const auto ev = field(g, w);
      return std::vector<double>(ev.p.begin(), ev.p.end());
    });
    double worst = 0.0;
    for (double m : rep.mean) worst = std::max(worst, std::abs(m));
    o.require(worst <= 4.0 / std::sqrt(double(n)), name + " max |mean residual| " + num(worst, 3) + " vs 4/sqrt(n) " +
                                                       num(4.0 / std::sqrt(double(n)), 3));
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "cone limit", 60, criterion_cone},
    {2, "losange limit", 120, criterion_losange},
    {3, "two-paths limits", 180, criterion_two_paths},
    {4, "tree-like limit", 120, criterion_tree_like},
    {5, "distance-one suppression", 60, criterion_distance_one},
    {6, "closed forms vs absorbing-chain solver", 10, criterion_oracle_equivalence},
    {7, "fixed-point residuals", 1, criterion_fixed_point_residuals},
    {8, "flow convergence and Lyapunov decay", 30, criterion_ode},
    {9, "contraction and sandwich", 5, criterion_contraction},
    {10, "urn properties", 30, criterion_urn},
    {11, "process invariants", 60, criterion_invariants},
};

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (only && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(secs < c.budget_seconds, "runtime " + num(secs, 3) + " s (budget " + num(c.budget_seconds) + " s)");
    std::printf("criterion %2d %-40s %s  %s\n", c.id, c.name, out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  return failures ? 1 : 0;
}
