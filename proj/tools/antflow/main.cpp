#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "antflow/field.hpp"
#include "antflow/flow.hpp"
#include "antflow/harness.hpp"
#include "antflow/limits.hpp"
#include "antflow/stats.hpp"
#include "antflow/urn.hpp"
#include "antflow/walk.hpp"

namespace {

using namespace antflow;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

MarkedGraph family_graph(const std::string& family, int p, int q, int depth, std::uint64_t seed) {
  if (family == "cone") return make_cone();
  if (family == "losange") return make_losange();
  if (family == "two-paths") return make_two_paths(p, q);
  if (family == "single-edge") return make_single_edge();
  if (family == "tree") {
    Rng rng(seed, 0);
    return make_random_tree_like(depth, rng);
  }
  throw Error("unknown family '" + family + "'");
}

UrnFunction parse_urn_function(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) arg = std::stod(spec.substr(colon + 1));
  auto need = [&] {
    if (!arg) throw Error("urn function '" + name + "' needs a parameter, e.g. " + name + ":0.5");
    return *arg;
  };
  if (name == "polya") return urn_functions::polya();
  if (name == "ratio") return urn_functions::ratio(need());
  if (name == "shifted") return urn_functions::shifted(need());
  if (name == "distance-one") return urn_functions::distance_one_bound(need());
  if (name == "constant") return urn_functions::constant(need());
  throw Error("unknown urn function '" + name + "'");
}

struct Common {
  std::string graph;
  std::string family;
  int p = 2;
  int q = 2;
  int depth = 3;

  void add_graph_options(CLI::App* cmd) {
    cmd->add_option("--graph", graph, "Graph file (node/edge/param lines)");
    cmd->add_option("--family", family, "Built-in graph: cone, losange, two-paths, tree, single-edge");
    cmd->add_option("--p", p, "First path length for two-paths");
    cmd->add_option("--q", q, "Second path length for two-paths");
    cmd->add_option("--depth", depth, "Depth of a generated tree-like graph");
  }

  GraphDocument document(std::uint64_t seed) const {
    if (!graph.empty()) return load_graph_document(graph);
    if (!family.empty()) return GraphDocument{family_graph(family, p, q, depth, seed), {}};
    throw Error("give --graph FILE or --family NAME");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-reinforced ant process toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  std::uint64_t seed = 1;
  int result = kPass;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the reinforced process and compare with the predicted limit");
  common.add_graph_options(sim);
  std::string config_path, out_dir;
  std::uint64_t ants = 0;
  std::size_t replicas = 0;
  double tol = 0.0;
  bool no_target = false;
  sim->add_option("--config", config_path, "Experiment file: graph plus param lines");
  auto* ants_opt = sim->add_option("--ants", ants, "Ants per replica");
  auto* rep_opt = sim->add_option("--replicas", replicas, "Independent replicas");
  auto* seed_opt = sim->add_option("--seed", seed, "Master seed");
  auto* tol_opt = sim->add_option("--tol", tol, "Sup-norm tolerance");
  sim->add_option("--out", out_dir, "Directory for trajectory CSVs and report.json");
  sim->add_flag("--no-target", no_target, "Skip the comparison with a predicted limit");
  sim->callback([&] {
    auto doc = !config_path.empty() ? load_graph_document(config_path) : common.document(seed);
    const std::string source = !config_path.empty() ? config_path : !common.graph.empty() ? common.graph : common.family;
    auto cfg = config_from_document(std::move(doc), source);
    if (*ants_opt) cfg.n_ants = ants;
    if (*rep_opt) cfg.replicas = replicas;
    if (*seed_opt) cfg.seed = seed;
    if (*tol_opt) cfg.tolerance = tol;
    if (no_target) cfg.target.reset();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const auto rep = run_experiment(cfg);
    std::cout << rep.to_json().dump(2) << '\n';
    result = rep.pass ? kPass : kFail;
  });

  // field
  auto* fld = app.add_subcommand("field", "Print p(w) and F(w) as CSV");
  common.add_graph_options(fld);
  std::string weights_file, weights_list;
  fld->add_option("--weights", weights_file, "Weight file: a list in edge order or '<edge> <value>' lines");
  fld->add_option("--w", weights_list, "Inline comma-separated weights in edge order");
  fld->callback([&] {
    const auto g = common.document(seed).graph;
    const auto w = !weights_file.empty() ? parse_weights(read_file(weights_file), g)
                   : !weights_list.empty() ? parse_weights(weights_list, g)
                                           : WeightVector::ones(g);
    const auto ev = field(g, w);
    std::cout << "edge,w,p,F\n" << std::setprecision(15);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      std::cout << g.edge(e).id << ',' << w[e] << ',' << ev.p[e] << ',' << ev.F[e] << '\n';
  });

  // ode
  auto* ode = app.add_subcommand("ode", "Integrate the mean-field flow; CSV of (t, state)");
  common.add_graph_options(ode);
  std::string start_list, ode_out;
  FlowOptions flow_opts;
  bool general_field = false;
  ode->add_option("--start", start_list, "Start weights (list in edge order); default: a random point of the attraction region");
  ode->add_option("--dt", flow_opts.dt, "RK4 step");
  ode->add_option("--t-max", flow_opts.t_max, "Final time");
  ode->add_option("--record-every", flow_opts.record_every, "Steps between recorded states");
  ode->add_option("--seed", seed, "Seed for the random start");
  ode->add_option("--out", ode_out, "Output CSV (default stdout)");
  ode->add_flag("--general", general_field, "Use the absorbing-chain field even when a closed form exists");
  ode->callback([&] {
    const auto g = common.document(seed).graph;
    const auto fam = classify(g);
    const auto sys = make_flow_system(g, general_field ? FieldSource::General : FieldSource::ClosedForm);
    WeightVector start;
    if (!start_list.empty()) {
      start = parse_weights(start_list, g);
    } else {
      Rng rng(seed, 0);
      start = WeightVector(sample_attraction_region(g, fam, rng));
    }
    const auto traj = integrate(sys, start.values(), flow_opts);
    std::ostringstream csv;
    csv << "t";
    for (const auto& e : g.edges()) csv << ',' << e.id;
    csv << '\n' << std::setprecision(12);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      csv << traj.times[i];
      for (double x : traj.states[i]) csv << ',' << x;
      csv << '\n';
    }
    write_text(ode_out, csv.str());
    const char* terminal = traj.terminal == FlowTerminal::Converged        ? "converged"
                           : traj.terminal == FlowTerminal::MaxTimeReached ? "max-time"
                                                                           : "left-domain";
    std::cerr << "terminal: " << terminal << ", |F| = " << traj.final_drift << '\n';
  });

  // urn
  auto* urn = app.add_subcommand("urn", "Simulate a G-urn; CSV of final values X_n/(n+2)");
  std::string urn_spec = "polya", urn_out;
  std::uint64_t steps = 10000, start_value = 1, start_time = 0;
  std::size_t urn_replicas = 100;
  urn->add_option("--G", urn_spec, "polya | ratio:Q | shifted:EPS | distance-one:K | constant:C");
  urn->add_option("--steps", steps, "Draws per replica");
  urn->add_option("--replicas", urn_replicas, "Independent replicas");
  urn->add_option("--seed", seed, "Master seed");
  urn->add_option("--start-value", start_value, "X at the start time");
  urn->add_option("--start-time", start_time, "Start time");
  urn->add_option("--out", urn_out, "Output CSV (default stdout)");
  urn->callback([&] {
    UrnSpec spec{parse_urn_function(urn_spec), start_value, start_time};
    const auto finals = urn_final_values(spec, steps, urn_replicas, seed);
    std::ostringstream csv;
    csv << "replica,final\n" << std::setprecision(12);
    for (std::size_t r = 0; r < finals.size(); ++r) csv << r << ',' << finals[r] << '\n';
    write_text(urn_out, csv.str());
    std::cerr << "mean " << stats::mean(finals) << ", std " << stats::stddev(finals) << ", stable points:";
    for (double p : stable_fixed_points(spec.G, uniform_grid(1001))) std::cerr << ' ' << p;
    std::cerr << '\n';
  });

  // limit
  auto* lim = app.add_subcommand("limit", "Predicted limit of W(n)/n");
  common.add_graph_options(lim);
  lim->callback([&] {
    const auto g = common.document(seed).graph;
    const auto pred = predict_limit(g);
    nlohmann::json j;
    j["family"] = to_string(pred.family.tag);
    j["method"] = to_string(pred.method);
    j["residual"] = std::isnan(pred.residual) ? nlohmann::json(nullptr) : nlohmann::json(pred.residual);
    for (std::size_t e = 0; e < g.edge_count(); ++e) j["limit"][g.edge(e).id] = pred.limit[e];
    if (!pred.deterministic()) {
      for (std::size_t i = 0; i < pred.dirichlet_edges.size(); ++i)
        j["dirichlet"][g.edge(pred.dirichlet_edges[i]).id] = pred.dirichlet_params[i];
    }
    std::cout << j.dump(2) << '\n';
  });

  // verify
  auto* ver = app.add_subcommand("verify", "Run the self-check batteries");
  std::string level = "quick";
  ver->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--seed", seed, "Master seed");
  ver->callback([&] {
    const auto report = verify_suite(level == "full" ? VerifyLevel::Full : VerifyLevel::Quick, seed);
    std::cout << report.dump(2) << '\n';
    result = report["pass"].get<bool>() ? kPass : kFail;
  });

  // plot
  auto* plt = app.add_subcommand("plot", "Emit a matplotlib script for a trajectory CSV");
  common.add_graph_options(plt);
  std::string csv_path, script_out, image = "trajectory.png";
  plt->add_option("--csv", csv_path, "Trajectory CSV")->required();
  plt->add_option("--out", script_out, "Script path (default stdout)");
  plt->add_option("--image", image, "Image file the script writes");
  plt->callback([&] {
    std::optional<PlotPrediction> pred;
    if (!common.graph.empty() || !common.family.empty()) {
      const auto g = common.document(seed).graph;
      pred = plot_prediction(g, predict_limit(g));
    }
    write_text(script_out, emit_plot_script(read_file(csv_path), pred, image));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "antflow: " << e.what() << '\n';
    return kError;
  }
  return result;
}
