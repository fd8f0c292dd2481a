#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "antflow/errors.hpp"

namespace antflow {

class Rng;

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Edge {
  std::string id;
  NodeIndex u = 0;
  NodeIndex v = 0;

  NodeIndex other(NodeIndex x) const noexcept { return x == u ? v : u; }
  bool touches(NodeIndex x) const noexcept { return x == u || x == v; }
};

/// Finite undirected multigraph with a nest node N and a food node F.
///
/// Parallel edges are distinct objects with their own ids; self-loops are
/// rejected. Construction validates every structural invariant, so a
/// MarkedGraph that exists is always usable by the walk and field code.
/// Immutable after construction.
class MarkedGraph {
 public:
  struct EdgeSpec {
    std::string id;
    std::string u;
    std::string v;
  };

  /// Throws GraphError on duplicate ids, unknown endpoints, self-loops,
  /// N == F, or F unreachable from N.
  static MarkedGraph build(std::vector<std::string> nodes, std::vector<EdgeSpec> edges,
                           std::string_view nest, std::string_view food);

  std::size_t node_count() const noexcept { return node_names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& node_name(NodeIndex x) const { return node_names_.at(x); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  NodeIndex nest() const noexcept { return nest_; }
  NodeIndex food() const noexcept { return food_; }

  /// Edge indices incident to `x`, in declaration order.
  std::span<const EdgeIndex> incident(NodeIndex x) const { return incidence_.at(x); }
  std::size_t degree(NodeIndex x) const { return incidence_.at(x).size(); }

  std::optional<NodeIndex> find_node(std::string_view name) const;
  std::optional<EdgeIndex> find_edge(std::string_view id) const;

  /// Number of parallel edges joining `a` and `b`.
  std::size_t multiplicity(NodeIndex a, NodeIndex b) const;

 private:
  MarkedGraph() = default;

  std::vector<std::string> node_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeIndex>> incidence_;
  NodeIndex nest_ = 0;
  NodeIndex food_ = 0;
};

/// A graph file plus any `param <key> <value>` lines it carried.
struct GraphDocument {
  MarkedGraph graph;
  std::vector<std::pair<std::string, std::string>> params;

  std::optional<std::string> param(std::string_view key) const;
};

/// Line-oriented grammar:
///   node <id> [nest|food]
///   edge <id> <u> <v>
///   param <key> <value>
/// `#` starts a comment; blank lines are ignored. Throws ParseError
/// (with the line number) on syntax errors and GraphError on structural ones.
GraphDocument parse_graph_document(std::string_view text);
MarkedGraph parse_graph(std::string_view text);
GraphDocument load_graph_document(const std::filesystem::path& path);

/// Canonical text form: nodes then edges, in index order.
std::string serialize(const MarkedGraph& g);

/// FNV-1a over the canonical serialization; stable across platforms.
std::uint64_t graph_hash(const MarkedGraph& g);

enum class FamilyTag { TreeLike, Cone, TwoPaths, Losange, General };

std::string_view to_string(FamilyTag tag);

/// Result of structural classification.
///
/// `canonical_edges` lists edge indices in the reference numbering of each
/// family:
///   Cone      {N,F}, {N,A}, {N,A}, {A,F}
///   Losange   {N,P2}, {P2,F}, {P2,P5}, {N,P5}, {P5,F}
///   TwoPaths  a_1..a_p, b_1..b_q (from N to F; p <= q)
///   TreeLike  the direct {N,F} edges
struct GraphFamily {
  FamilyTag tag = FamilyTag::General;
  int p = 0;
  int q = 0;
  std::size_t nest_food_multiplicity = 0;
  std::vector<EdgeIndex> canonical_edges;

  bool is(FamilyTag t) const noexcept { return tag == t; }
};

/// Most specific family: Cone, Losange, TwoPaths (min(p,q) >= 2), TreeLike
/// (acyclic once F is removed, and at least one {N,F} edge), else General.
GraphFamily classify(const MarkedGraph& g);

/// Self-avoiding N -> F paths.
struct PathCatalog {
  std::vector<std::vector<EdgeIndex>> paths;
  std::size_t count = 0;
  std::size_t max_length = 0;
  std::size_t nest_degree = 0;
};

inline constexpr std::size_t kDefaultPathCeiling = 1'000'000;

/// Exhaustive depth-first enumeration. Throws PathLimitError once more than
/// `ceiling` paths have been found.
PathCatalog enumerate_paths(const MarkedGraph& g, std::size_t ceiling = kDefaultPathCeiling);

// Reference graphs. Edge ids follow the canonical numbering above
// ("1".."5" for cone/losange, "a1".."ap","b1".."bq" for two paths).
MarkedGraph make_single_edge();
MarkedGraph make_cone();
MarkedGraph make_losange();
MarkedGraph make_two_paths(int p, int q);
/// `count` parallel {N,F} edges.
MarkedGraph make_nest_food_bundle(int count);

/// Random tree rooted at N of the given depth whose leaves are merged into F,
/// plus `direct_edges` parallel {N,F} edges.
MarkedGraph make_random_tree_like(int depth, Rng& rng, int max_children = 2, int direct_edges = 1);

}  // namespace antflow
