#include "antflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "antflow/field.hpp"
#include "antflow/flow.hpp"
#include "antflow/stats.hpp"
#include "antflow/urn.hpp"
#include "antflow/walk.hpp"
#include "parallel.hpp"

namespace antflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line, bool commas) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r' || (commas && c == ','))
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

std::optional<double> to_double(const std::string& s) {
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value[0] == '-')
    throw Error("param " + key + ": expected a non-negative integer, got '" + value + "'");
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicas == 0) throw Error("replicas must be at least 1");
  if (n_ants == 0) throw Error("n_ants must be at least 1");
  if (!(tolerance > 0.0)) throw Error("tolerance must be positive");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || schedule[i] > n_ants) throw Error("schedule entries must lie in [1, n_ants]");
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw Error("schedule must be strictly increasing");
  }
  if (target && target->limit.size() != graph.edge_count())
    throw Error("target limit does not match the graph's edge count");
}

ExperimentConfig config_from_document(GraphDocument doc, std::string source) {
  ExperimentConfig cfg(std::move(doc.graph));
  cfg.graph_source = std::move(source);
  bool want_target = true;
  for (const auto& [key, value] : doc.params) {
    if (key == "ants") {
      cfg.n_ants = to_count(key, value);
    } else if (key == "replicas") {
      cfg.replicas = to_count(key, value);
    } else if (key == "seed") {
      cfg.seed = to_count(key, value);
    } else if (key == "tol") {
      const auto v = to_double(value);
      if (!v) throw Error("param tol: expected a number, got '" + value + "'");
      cfg.tolerance = *v;
    } else if (key == "target") {
      if (value != "auto" && value != "none") throw Error("param target: expected auto or none");
      want_target = value == "auto";
    } else {
      throw Error("unknown param '" + key + "'");
    }
  }
  if (want_target && classify(cfg.graph).tag != FamilyTag::General) cfg.target = predict_limit(cfg.graph);
  cfg.validate();
  return cfg;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json j;
  j["graph_hash"] = graph_hash;
  j["family"] = family;
  j["seed"] = seed;
  j["n_ants"] = n_ants;
  j["replicas"] = replicas;
  j["tolerance"] = tolerance;
  j["runtime_seconds"] = runtime_seconds;
  j["has_target"] = has_target;
  j["pass"] = pass;
  j["deviation"] = has_target ? nlohmann::json(deviation) : nlohmann::json(nullptr);
  if (has_target) j["method"] = method;
  j["conventions"] = {
      {"normalization", "W(n)/n"},
      {"initial_weights", 1},
      {"rng", "philox4x32-10, key = seed, replica r on stream r"},
      {"trajectory_files", "trajectory_r<k>.csv"},
  };
  auto& edges = j["edges"] = nlohmann::json::array();
  for (std::size_t e = 0; e < edge_ids.size(); ++e) {
    nlohmann::json row{{"id", edge_ids[e]}, {"mean", mean[e]}, {"std", stddev[e]}};
    if (predicted) {
      row["predicted"] = (*predicted)[e];
      row["deterministic"] = static_cast<bool>(deterministic[e]);
    }
    edges.push_back(std::move(row));
  }
  return j;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const MarkedGraph& g = cfg.graph;
  const std::size_t m = g.edge_count();

  ProcessOptions opts;
  opts.schedule = cfg.schedule.empty() ? geometric_schedule(cfg.n_ants) : cfg.schedule;

  std::vector<std::vector<double>> finals(cfg.replicas);
  std::vector<std::vector<Snapshot>> snapshots(cfg.replicas);
  detail::parallel_for(cfg.replicas, [&](std::size_t r) {
    auto res = run_process(g, cfg.n_ants, cfg.seed, r, opts);
    finals[r].resize(m);
    for (std::size_t e = 0; e < m; ++e)
      finals[r][e] = static_cast<double>(res.counts[e]) / static_cast<double>(cfg.n_ants);
    snapshots[r] = std::move(res.snapshots);
  });

  ConvergenceReport rep;
  rep.n_ants = cfg.n_ants;
  rep.replicas = cfg.replicas;
  rep.seed = cfg.seed;
  rep.graph_hash = graph_hash(g);
  rep.tolerance = cfg.tolerance;
  rep.family = std::string(to_string(classify(g).tag));
  std::vector<double> column(cfg.replicas);
  for (std::size_t e = 0; e < m; ++e) {
    rep.edge_ids.push_back(g.edge(e).id);
    for (std::size_t r = 0; r < cfg.replicas; ++r) column[r] = finals[r][e];
    rep.mean.push_back(stats::mean(column));
    rep.stddev.push_back(stats::stddev(column));
  }

  if (cfg.target) {
    rep.has_target = true;
    rep.predicted = cfg.target->limit;
    rep.method = std::string(to_string(cfg.target->method));
    rep.deviation = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      const bool det = cfg.target->deterministic_edge(e);
      rep.deterministic.push_back(det);
      if (det) rep.deviation = std::max(rep.deviation, std::abs(rep.mean[e] - cfg.target->limit[e]));
    }
    rep.pass = rep.deviation <= cfg.tolerance;
  } else {
    rep.deviation = std::numeric_limits<double>::quiet_NaN();
    rep.pass = true;
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (cfg.out_dir) {
    std::filesystem::create_directories(*cfg.out_dir);
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      const auto path = *cfg.out_dir / ("trajectory_r" + std::to_string(r) + ".csv");
      std::ofstream out(path);
      if (!out) throw Error("cannot write " + path.string());
      write_trajectory_csv(out, g, snapshots[r]);
    }
    auto j = rep.to_json();
    j["graph_source"] = cfg.graph_source;
    const auto path = *cfg.out_dir / "report.json";
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }
  return rep;
}

WeightVector parse_weights(std::string_view text, const MarkedGraph& g) {
  struct Line {
    std::size_t number;
    std::string content;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto t = trim(raw);
    if (!t.empty()) lines.push_back({number, std::move(t)});
  }
  if (lines.empty()) throw ParseError(0, "no weights given");

  const std::size_t m = g.edge_count();
  auto check_value = [](const Line& l, const std::string& tok) {
    const auto v = to_double(tok);
    if (!v) throw ParseError(l.number, "not a number: '" + tok + "'");
    if (!std::isfinite(*v) || *v < 0.0) throw ParseError(l.number, "weights must be finite and non-negative");
    return *v;
  };

  // Positional when every token is numeric and there is one per edge; keyed
  // when every line is an edge id and a value. Numeric edge ids make both
  // readings possible, so the count decides first.
  bool numeric = true, pairs = true;
  std::size_t tokens = 0;
  for (const auto& l : lines) {
    const auto all = split_fields(l.content, true);
    tokens += all.size();
    for (const auto& tok : all)
      if (!to_double(tok)) numeric = false;
    const auto kv = split_fields(l.content, false);
    if (kv.size() != 2 || !g.find_edge(kv[0])) pairs = false;
  }
  const bool positional = numeric && (tokens == m || !pairs);

  std::vector<double> w;
  if (positional) {
    for (const auto& l : lines)
      for (const auto& tok : split_fields(l.content, true)) {
        if (w.size() == m)
          throw ParseError(l.number, "too many weights; the graph has " + std::to_string(m) + " edges");
        w.push_back(check_value(l, tok));
      }
    if (w.size() != m)
      throw ParseError(lines.back().number,
                       "expected " + std::to_string(m) + " weights, got " + std::to_string(w.size()));
    return WeightVector(std::move(w));
  }

  w.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (const auto& l : lines) {
    const auto tok = split_fields(l.content, false);
    if (tok.size() != 2) throw ParseError(l.number, "expected '<edge-id> <value>'");
    const auto e = g.find_edge(tok[0]);
    if (!e) throw ParseError(l.number, "unknown edge '" + tok[0] + "'");
    if (!std::isnan(w[*e])) throw ParseError(l.number, "duplicate weight for edge '" + tok[0] + "'");
    w[*e] = check_value(l, tok[1]);
  }
  for (std::size_t e = 0; e < m; ++e)
    if (std::isnan(w[e])) throw ParseError(0, "no weight given for edge '" + g.edge(e).id + "'");
  return WeightVector(std::move(w));
}

namespace {

struct Battery {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;

  void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = body();
    } catch (const std::exception& ex) {
      ok = false;
      detail = std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    checks.push_back({{"name", name}, {"pass", ok}, {"detail", detail}, {"seconds", secs}});
    all = all && ok;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::pair<bool, std::string> oracle_agreement(const MarkedGraph& g, std::size_t points, std::uint64_t seed,
                                              const std::function<std::vector<double>(Rng&)>& draw,
                                              const std::function<FieldEvaluation(std::span<const double>)>& closed) {
  const auto fam = classify(g);
  Rng rng(seed, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const auto c = draw(rng);
    const auto cf = closed(c);
    const auto general = to_canonical(fam, field(g, from_canonical(fam, c, g.edge_count())).p);
    worst = std::max(worst, sup_distance(cf.p.values(), general));
  }
  return {worst < 1e-10, "max |closed - general| = " + fmt(worst)};
}

std::pair<bool, std::string> experiment_check(ExperimentConfig cfg) {
  const auto rep = run_experiment(cfg);
  return {rep.pass, rep.family + " deviation " + fmt(rep.deviation) + " (tol " + fmt(rep.tolerance) + ")"};
}

}  // namespace

nlohmann::json verify_suite(VerifyLevel level, std::uint64_t seed) {
  Battery b;
  const std::size_t points = level == VerifyLevel::Quick ? 200 : 1000;

  b.run("oracle.cone", [&] {
    return oracle_agreement(
        make_cone(), points, seed,
        [](Rng& r) {
          const double w1 = r.uniform(0.05, 0.95);
          return std::vector<double>{w1, r.uniform(0.05, 1), r.uniform(0.05, 1), 1 - w1};
        },
        [](std::span<const double> c) { return closed_form_cone(c); });
  });
  for (auto [p, q] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    b.run("oracle.two_paths(" + std::to_string(p) + "," + std::to_string(q) + ")", [&, p = p, q = q] {
      return oracle_agreement(
          make_two_paths(p, q), points, seed,
          [p, q](Rng& r) {
            std::vector<double> c(p + q);
            for (auto& x : c) x = r.uniform(0.05, 1.0);
            return c;
          },
          [p, q](std::span<const double> c) { return closed_form_two_paths(p, q, c); });
    });
  }
  b.run("oracle.losange", [&] {
    return oracle_agreement(
        make_losange(), points, seed,
        [](Rng& r) {
          const double w2 = r.uniform(0.05, 0.95);
          return std::vector<double>{r.uniform(0.05, 1), w2, r.uniform(0.05, 1), r.uniform(0.05, 1), 1 - w2};
        },
        [](std::span<const double> c) { return closed_form_losange(c).eval; });
  });

  b.run("limits.residuals", [] {
    double worst = 0.0;
    for (const auto& g : {make_single_edge(), make_cone(), make_losange(), make_two_paths(2, 2),
                          make_two_paths(2, 3), make_two_paths(3, 3)})
      worst = std::max(worst, predict_limit(g).residual);
    return std::pair{worst < 1e-10, "max residual " + fmt(worst)};
  });

  b.run("contraction.derivative", [] {
    double worst = 0.0;
    for (int p = 2; p <= 10; ++p)
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0, h = 1e-6;
        const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
        worst = std::max(worst, std::abs((f_p(p, hi) - f_p(p, lo)) / (hi - lo)));
      }
    return std::pair{worst < 1.0, "sup |f_p'| = " + fmt(worst)};
  });
  b.run("contraction.sandwich", [] {
    double worst = 0.0;
    for (auto [p, q] : {std::pair{2, 2}, {2, 3}}) worst = std::max(worst, sandwich_iteration(p, q).back().gap());
    return std::pair{worst < 1e-10, "terminal gap " + fmt(worst)};
  });

  b.run("urn.fixed_points", [] {
    const auto fp = stable_fixed_points(urn_functions::ratio(2.0), uniform_grid(1001));
    const bool ok = fp.size() == 1 && std::abs(fp[0] - 0.5) < 1e-9;
    return std::pair{ok, "stable points: " + std::to_string(fp.size())};
  });
  b.run("urn.polya_uniform", [&] {
    const std::size_t reps = level == VerifyLevel::Quick ? 500 : 2000;
    const auto ks = stats::ks_uniform(urn_final_values({urn_functions::polya()}, 2000, reps, seed));
    return std::pair{ks.pass, "KS " + fmt(ks.statistic) + " vs " + fmt(ks.critical)};
  });

  b.run("process.invariants", [&] {
    const std::uint64_t n = level == VerifyLevel::Quick ? 2000 : 20000;
    for (const auto& g : {make_cone(), make_losange(), make_two_paths(2, 3)}) {
      const auto cat = enumerate_paths(g);
      const auto fam = classify(g);
      std::string failure;
      ProcessOptions opts;
      opts.observer = [&](std::uint64_t k, std::span<const std::uint64_t> w, const TraceRecord& t) {
        if (!failure.empty()) return;
        if (!trace_is_connected(g, t.crossed)) failure = "disconnected trace";
        if (!in_some_E_i(g, cat, w, k + 1)) failure = "left the E region";
        if (fam.is(FamilyTag::TwoPaths) &&
            w[fam.canonical_edges[fam.p - 1]] + w[fam.canonical_edges.back()] != k + 2)
          failure = "two-paths conservation";
      };
      run_process(g, n, seed, 0, opts);
      if (!failure.empty()) return std::pair{false, std::string(to_string(fam.tag)) + ": " + failure};
    }
    return std::pair{true, std::string("ok")};
  });

  b.run("experiment.single_edge", [] {
    ExperimentConfig cfg(make_single_edge());
    cfg.n_ants = 1000;
    cfg.target = predict_limit(cfg.graph);
    cfg.tolerance = 1.0 / 1000;
    return experiment_check(cfg);
  });

  if (level == VerifyLevel::Full) {
    b.run("ode.losange", [&] {
      const auto g = make_losange();
      const auto fam = classify(g);
      const auto sys = make_flow_system(g);
      const auto target = limit_losange(g).limit;
      Rng rng(seed, 1);
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const auto y0 = sample_attraction_region(g, fam, rng);
        worst = std::max(worst, sup_distance(integrate(sys, y0).final_state(), target));
      }
      return std::pair{worst < 1e-6, "max distance to limit " + fmt(worst)};
    });
    auto mc = [&](const std::string& name, MarkedGraph g) {
      b.run(name, [&, g = std::move(g)]() mutable {
        ExperimentConfig cfg(std::move(g));
        cfg.n_ants = 1'000'000;
        cfg.replicas = 20;
        cfg.seed = seed;
        cfg.schedule = {cfg.n_ants};
        cfg.target = predict_limit(cfg.graph);
        return experiment_check(cfg);
      });
    };
    mc("monte_carlo.cone", make_cone());
    mc("monte_carlo.losange", make_losange());
    mc("monte_carlo.two_paths(2,2)", make_two_paths(2, 2));
    mc("monte_carlo.two_paths(2,3)", make_two_paths(2, 3));
    mc("monte_carlo.two_paths(3,3)", make_two_paths(3, 3));
    for (int depth = 2; depth <= 4; ++depth) {
      Rng rng(seed + depth, 0);
      mc("monte_carlo.tree_like(depth " + std::to_string(depth) + ")", make_random_tree_like(depth, rng));
    }
  }

  return {{"level", level == VerifyLevel::Quick ? "quick" : "full"}, {"pass", b.all}, {"checks", b.checks}};
}

PlotPrediction plot_prediction(const MarkedGraph& g, const LimitPrediction& pred) {
  PlotPrediction out;
  for (const auto& e : g.edges()) out.edge_ids.push_back(e.id);
  out.limit = pred.limit;
  out.family = pred.family.tag;
  if (pred.family.is(FamilyTag::Cone))
    out.phase_pair = std::pair{g.edge(pred.family.canonical_edges[1]).id, g.edge(pred.family.canonical_edges[2]).id};
  return out;
}

std::string emit_plot_script(std::string_view csv, const std::optional<PlotPrediction>& prediction,
                             std::string_view output_image) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++number;
    if (!trim(line).empty()) {
      for (std::string_view rest = line;;) {
        const auto comma = rest.find(',');
        header.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      break;
    }
  }
  if (header.empty()) throw ParseError(0, "empty trajectory CSV");
  if (header[0] != "n" && header[0] != "t") throw ParseError(number, "header must start with 'n' or 't'");
  const bool flow_time = header[0] == "t";
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c].empty()) throw ParseError(number, "empty column name");

  std::vector<std::vector<double>> columns(header.size());
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (std::string_view rest = line;;) {
      const auto comma = rest.find(',');
      cells.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != header.size())
      throw ParseError(number, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = to_double(cells[c]);
      if (!v) throw ParseError(number, "not a number: '" + cells[c] + "'");
      columns[c].push_back(*v);
    }
  }

  auto list = [](const std::vector<double>& v) {
    std::ostringstream os;
    os << std::setprecision(12) << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
    return os.str();
  };
  auto quoted = [](const std::string& s) {
    std::string q = "'";
    for (char c : s) {
      if (c == '\\' || c == '\'') q.push_back('\\');
      q.push_back(c);
    }
    return q + "'";
  };

  const bool has_rows = !columns[0].empty();
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n"
     << "import numpy as np\n\n"
     << "n = " << list(columns[0]) << "\n"
     << "series = {\n";
  if (has_rows)
    for (std::size_t c = 1; c < header.size(); ++c) py << "    " << quoted(header[c]) << ": " << list(columns[c]) << ",\n";
  py << "}\n"
     << "limits = {\n";
  if (prediction)
    for (std::size_t e = 0; e < prediction->edge_ids.size() && e < prediction->limit.size(); ++e)
      py << "    " << quoted(prediction->edge_ids[e]) << ": " << std::setprecision(12) << prediction->limit[e] << ",\n";
  py << "}\n\n";

  const bool phase = prediction && prediction->phase_pair && has_rows;
  py << "fig, axes = plt.subplots(1, " << (phase ? 2 : 1) << ", figsize=(" << (phase ? 12 : 7) << ", 5), squeeze=False)\n"
     << "ax = axes[0][0]\n"
     << "for k, (name, ys) in enumerate(series.items()):\n"
     << "    color = 'C%d' % (k % 10)\n"
     << "    ax.plot(n, ys, color=color, label=name)\n"
     << "    if name in limits:\n"
     << "        ax.axhline(limits[name], color=color, linestyle='--', linewidth=0.8)\n"
     << (flow_time ? "ax.set_xlabel('t')\nax.set_ylabel('w(t)')\n"
                   : "ax.set_xscale('log')\nax.set_xlabel('n')\nax.set_ylabel('W(n)/n')\n")
     << "if series:\n"
     << "    ax.legend()\n";
  if (phase) {
    const auto& [e2, e3] = *prediction->phase_pair;
    py << "\nax = axes[0][1]\n"
       << "s = np.linspace(0.0, 0.49, 400)\n"
       << "curve = s**2 / (1 - 2 * s)\n"
       << "keep = curve <= 1\n"
       << "ax.plot(s[keep], curve[keep], color='tab:blue', label='F2 = 0')\n"
       << "ax.plot(curve[keep], s[keep], color='tab:red', label='F3 = 0')\n"
       << "ax.plot(series[" << quoted(e2) << "], series[" << quoted(e3) << "], color='black', linewidth=0.8, label='trajectory')\n"
       << "ax.plot([1/3], [1/3], 'k*', markersize=10)\n"
       << "ax.set_xlim(0, 1)\n"
       << "ax.set_ylim(0, 1)\n"
       << "ax.set_xlabel('w2')\n"
       << "ax.set_ylabel('w3')\n"
       << "ax.legend()\n";
  }
  py << "\nfig.tight_layout()\n"
     << "fig.savefig(" << quoted(std::string(output_image)) << ", dpi=150)\n";
  return py.str();
}

}  // namespace antflow
