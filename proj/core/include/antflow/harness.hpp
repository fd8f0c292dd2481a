#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "antflow/graph.hpp"
#include "antflow/limits.hpp"
#include "antflow/weights.hpp"

namespace antflow {

struct ExperimentConfig {
  explicit ExperimentConfig(MarkedGraph g) : graph(std::move(g)) {}

  MarkedGraph graph;
  std::string graph_source = "<memory>";
  std::uint64_t n_ants = 1000;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  /// Empty means geometric_schedule(n_ants).
  std::vector<std::uint64_t> schedule;
  std::optional<LimitPrediction> target;
  double tolerance = 0.02;
  /// When set, trajectory_r<k>.csv and report.json are written here.
  std::optional<std::filesystem::path> out_dir;

  /// Throws Error on replicas == 0, n_ants == 0, tolerance <= 0 or a bad schedule.
  void validate() const;
};

/// Reads `ants`, `replicas`, `seed`, `tol` and `target` (auto|none) params.
/// With target=auto (the default) the prediction comes from predict_limit
/// when the family is recognised.
ExperimentConfig config_from_document(GraphDocument doc, std::string source = "<memory>");

struct ConvergenceReport {
  std::vector<std::string> edge_ids;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::optional<std::vector<double>> predicted;
  std::vector<bool> deterministic;
  /// Sup over deterministic edges of |mean - predicted|; NaN without a target.
  double deviation = 0.0;
  double tolerance = 0.0;
  bool has_target = false;
  bool pass = false;
  std::uint64_t n_ants = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::uint64_t graph_hash = 0;
  std::string family;
  std::string method;
  double runtime_seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Runs the replicas concurrently (replica r on stream r of cfg.seed) and
/// reduces in replica order. Without a target the report passes trivially.
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

/// Either one comma/whitespace separated list in edge order, or one
/// `<edge-id> <value>` pair per line. `#` comments and blank lines are
/// skipped. Throws ParseError naming the offending line.
WeightVector parse_weights(std::string_view text, const MarkedGraph& g);

enum class VerifyLevel { Quick, Full };

/// {"level", "pass", "checks": [{"name", "pass", "detail", "seconds"}]}.
/// Failures are entries, never exceptions.
nlohmann::json verify_suite(VerifyLevel level, std::uint64_t seed = 2024);

struct PlotPrediction {
  std::vector<std::string> edge_ids;
  std::vector<double> limit;
  FamilyTag family = FamilyTag::General;
  /// Column ids of the cone's double edge, for the phase portrait.
  std::optional<std::pair<std::string, std::string>> phase_pair;
};

PlotPrediction plot_prediction(const MarkedGraph& g, const LimitPrediction& pred);

/// A standalone matplotlib script with the data inlined. Throws ParseError
/// on a malformed trajectory CSV.
std::string emit_plot_script(std::string_view csv, const std::optional<PlotPrediction>& prediction,
                             std::string_view output_image = "trajectory.png");

}  // namespace antflow
