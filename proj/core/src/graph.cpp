#include "antflow/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "antflow/rng.hpp"

namespace antflow {

MarkedGraph MarkedGraph::build(std::vector<std::string> nodes, std::vector<EdgeSpec> edges,
                               std::string_view nest, std::string_view food) {
  MarkedGraph g;
  std::unordered_map<std::string, NodeIndex> by_name;
  for (auto& name : nodes) {
    if (name.empty()) throw GraphError("empty node id");
    if (!by_name.emplace(name, g.node_names_.size()).second)
      throw GraphError("duplicate node id '" + name + "'");
    g.node_names_.push_back(std::move(name));
  }
  auto lookup = [&](const std::string& name, const char* role) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw GraphError(std::string(role) + " '" + name + "' is not a declared node");
    return it->second;
  };
  const auto nest_key = std::string(nest);
  const auto food_key = std::string(food);
  g.nest_ = lookup(nest_key, "nest");
  g.food_ = lookup(food_key, "food");
  if (g.nest_ == g.food_) throw GraphError("nest and food must be distinct nodes");

  std::unordered_set<std::string> ids;
  g.incidence_.resize(g.node_names_.size());
  for (auto& spec : edges) {
    if (spec.id.empty()) throw GraphError("empty edge id");
    if (!ids.insert(spec.id).second) throw GraphError("duplicate edge id '" + spec.id + "'");
    const NodeIndex u = lookup(spec.u, "endpoint");
    const NodeIndex v = lookup(spec.v, "endpoint");
    if (u == v) throw GraphError("edge '" + spec.id + "' is a self-loop");
    const EdgeIndex e = g.edges_.size();
    g.edges_.push_back(Edge{std::move(spec.id), u, v});
    g.incidence_[u].push_back(e);
    g.incidence_[v].push_back(e);
  }

  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeIndex> stack{g.nest_};
  seen[g.nest_] = 1;
  while (!stack.empty()) {
    const NodeIndex x = stack.back();
    stack.pop_back();
    for (EdgeIndex e : g.incidence_[x]) {
      const NodeIndex y = g.edges_[e].other(x);
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  if (!seen[g.food_]) throw GraphError("food is not reachable from nest");
  return g;
}

std::optional<NodeIndex> MarkedGraph::find_node(std::string_view name) const {
  for (NodeIndex x = 0; x < node_names_.size(); ++x)
    if (node_names_[x] == name) return x;
  return std::nullopt;
}

std::optional<EdgeIndex> MarkedGraph::find_edge(std::string_view id) const {
  for (EdgeIndex e = 0; e < edges_.size(); ++e)
    if (edges_[e].id == id) return e;
  return std::nullopt;
}

std::size_t MarkedGraph::multiplicity(NodeIndex a, NodeIndex b) const {
  std::size_t count = 0;
  for (EdgeIndex e : incidence_.at(a))
    if (edges_[e].other(a) == b) ++count;
  return count;
}

std::optional<std::string> GraphDocument::param(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return std::nullopt;
}

GraphDocument parse_graph_document(std::string_view text) {
  std::vector<std::string> nodes;
  std::vector<MarkedGraph::EdgeSpec> edges;
  std::vector<std::pair<std::string, std::string>> params;
  std::unordered_set<std::string> declared;
  std::optional<std::string> nest, food;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::vector<std::string> tok;
    for (std::string t; line >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "node") {
      if (tok.size() < 2 || tok.size() > 3) throw ParseError(line_no, "expected 'node <id> [nest|food]'");
      if (!declared.insert(tok[1]).second) throw ParseError(line_no, "duplicate node id '" + tok[1] + "'");
      if (tok.size() == 3) {
        if (tok[2] != "nest" && tok[2] != "food")
          throw ParseError(line_no, "unknown node marker '" + tok[2] + "'");
        auto& slot = tok[2] == "nest" ? nest : food;
        if (slot) throw ParseError(line_no, "second " + tok[2] + " marker");
        slot = tok[1];
      }
      nodes.push_back(tok[1]);
    } else if (tok[0] == "edge") {
      if (tok.size() != 4) throw ParseError(line_no, "expected 'edge <id> <u> <v>'");
      for (const auto& end : {tok[2], tok[3]})
        if (!declared.count(end)) throw ParseError(line_no, "unknown node '" + end + "'");
      if (tok[2] == tok[3]) throw ParseError(line_no, "self-loop on node '" + tok[2] + "'");
      for (const auto& spec : edges)
        if (spec.id == tok[1]) throw ParseError(line_no, "duplicate edge id '" + tok[1] + "'");
      edges.push_back({tok[1], tok[2], tok[3]});
    } else if (tok[0] == "param") {
      if (tok.size() != 3) throw ParseError(line_no, "expected 'param <key> <value>'");
      params.emplace_back(tok[1], tok[2]);
    } else {
      throw ParseError(line_no, "unknown directive '" + tok[0] + "'");
    }
  }
  if (!nest) throw ParseError(0, "missing nest marker");
  if (!food) throw ParseError(0, "missing food marker");
  return GraphDocument{MarkedGraph::build(std::move(nodes), std::move(edges), *nest, *food),
                       std::move(params)};
}

MarkedGraph parse_graph(std::string_view text) { return parse_graph_document(text).graph; }

GraphDocument load_graph_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph_document(buf.str());
}

std::string serialize(const MarkedGraph& g) {
  std::ostringstream out;
  for (NodeIndex x = 0; x < g.node_count(); ++x) {
    out << "node " << g.node_name(x);
    if (x == g.nest()) out << " nest";
    if (x == g.food()) out << " food";
    out << '\n';
  }
  for (const Edge& e : g.edges())
    out << "edge " << e.id << ' ' << g.node_name(e.u) << ' ' << g.node_name(e.v) << '\n';
  return out.str();
}

std::uint64_t graph_hash(const MarkedGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize(g)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::TreeLike: return "tree-like";
    case FamilyTag::Cone: return "cone";
    case FamilyTag::TwoPaths: return "two-paths";
    case FamilyTag::Losange: return "losange";
    case FamilyTag::General: return "general";
  }
  return "general";
}

namespace {

std::vector<EdgeIndex> edges_between(const MarkedGraph& g, NodeIndex a, NodeIndex b) {
  std::vector<EdgeIndex> out;
  for (EdgeIndex e : g.incident(a))
    if (g.edge(e).other(a) == b) out.push_back(e);
  return out;
}

std::optional<GraphFamily> match_cone(const MarkedGraph& g) {
  if (g.node_count() != 3 || g.edge_count() != 4) return std::nullopt;
  const NodeIndex n = g.nest(), f = g.food();
  const NodeIndex a = 3 - n - f;
  auto nf = edges_between(g, n, f), na = edges_between(g, n, a), af = edges_between(g, a, f);
  if (nf.size() != 1 || na.size() != 2 || af.size() != 1) return std::nullopt;
  GraphFamily fam;
  fam.tag = FamilyTag::Cone;
  fam.nest_food_multiplicity = 1;
  fam.canonical_edges = {nf[0], na[0], na[1], af[0]};
  return fam;
}

std::optional<GraphFamily> match_losange(const MarkedGraph& g) {
  if (g.node_count() != 4 || g.edge_count() != 5) return std::nullopt;
  const NodeIndex n = g.nest(), f = g.food();
  if (g.degree(n) != 2 || g.degree(f) != 2 || g.multiplicity(n, f) != 0) return std::nullopt;
  const NodeIndex x = g.edge(g.incident(n)[0]).other(n);
  const NodeIndex y = g.edge(g.incident(n)[1]).other(n);
  if (x == y) return std::nullopt;
  auto nx = edges_between(g, n, x), xf = edges_between(g, x, f), xy = edges_between(g, x, y),
       ny = edges_between(g, n, y), yf = edges_between(g, y, f);
  if (nx.size() != 1 || xf.size() != 1 || xy.size() != 1 || ny.size() != 1 || yf.size() != 1)
    return std::nullopt;
  GraphFamily fam;
  fam.tag = FamilyTag::Losange;
  fam.canonical_edges = {nx[0], xf[0], xy[0], ny[0], yf[0]};
  return fam;
}

std::optional<GraphFamily> match_two_paths(const MarkedGraph& g) {
  const NodeIndex n = g.nest(), f = g.food();
  if (g.edge_count() != g.node_count() || g.degree(n) != 2 || g.degree(f) != 2) return std::nullopt;
  for (NodeIndex x = 0; x < g.node_count(); ++x)
    if (g.degree(x) != 2) return std::nullopt;

  std::vector<std::vector<EdgeIndex>> arms;
  for (EdgeIndex start : g.incident(n)) {
    std::vector<EdgeIndex> arm{start};
    NodeIndex at = g.edge(start).other(n);
    EdgeIndex via = start;
    while (at != f) {
      if (at == n || arm.size() > g.edge_count()) return std::nullopt;
      const auto inc = g.incident(at);
      via = inc[0] == via ? inc[1] : inc[0];
      arm.push_back(via);
      at = g.edge(via).other(at);
    }
    arms.push_back(std::move(arm));
  }
  if (arms[0].size() + arms[1].size() != g.edge_count()) return std::nullopt;
  if (arms[1].size() < arms[0].size()) std::swap(arms[0], arms[1]);
  if (arms[0].size() < 2) return std::nullopt;

  GraphFamily fam;
  fam.tag = FamilyTag::TwoPaths;
  fam.p = static_cast<int>(arms[0].size());
  fam.q = static_cast<int>(arms[1].size());
  fam.canonical_edges = arms[0];
  fam.canonical_edges.insert(fam.canonical_edges.end(), arms[1].begin(), arms[1].end());
  return fam;
}

std::optional<GraphFamily> match_tree_like(const MarkedGraph& g) {
  const NodeIndex f = g.food();
  auto direct = edges_between(g, g.nest(), f);
  if (direct.empty()) return std::nullopt;

  std::vector<NodeIndex> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), NodeIndex{0});
  auto root = [&](NodeIndex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) {
    if (e.touches(f)) continue;
    const NodeIndex ru = root(e.u), rv = root(e.v);
    if (ru == rv) return std::nullopt;
    parent[ru] = rv;
  }
  GraphFamily fam;
  fam.tag = FamilyTag::TreeLike;
  fam.nest_food_multiplicity = direct.size();
  fam.canonical_edges = std::move(direct);
  return fam;
}

}  // namespace

GraphFamily classify(const MarkedGraph& g) {
  if (auto fam = match_cone(g)) return *fam;
  if (auto fam = match_losange(g)) return *fam;
  if (auto fam = match_two_paths(g)) return *fam;
  if (auto fam = match_tree_like(g)) return *fam;
  GraphFamily fam;
  fam.nest_food_multiplicity = g.multiplicity(g.nest(), g.food());
  return fam;
}

PathCatalog enumerate_paths(const MarkedGraph& g, std::size_t ceiling) {
  PathCatalog cat;
  cat.nest_degree = g.degree(g.nest());
  std::vector<char> on_path(g.node_count(), 0);
  std::vector<EdgeIndex> path;

  // Explicit stack of (node, next incidence slot) avoids deep recursion on long chains.
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{g.nest(), 0}};
  on_path[g.nest()] = 1;
  while (!stack.empty()) {
    auto& [x, slot] = stack.back();
    const auto inc = g.incident(x);
    if (slot == inc.size()) {
      on_path[x] = 0;
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const EdgeIndex e = inc[slot++];
    const NodeIndex y = g.edge(e).other(x);
    if (on_path[y]) continue;
    if (y == g.food()) {
      if (cat.paths.size() == ceiling)
        throw PathLimitError("more than " + std::to_string(ceiling) + " self-avoiding paths");
      cat.paths.push_back(path);
      cat.paths.back().push_back(e);
      cat.max_length = std::max(cat.max_length, cat.paths.back().size());
      continue;
    }
    on_path[y] = 1;
    path.push_back(e);
    stack.emplace_back(y, 0);
  }
  cat.count = cat.paths.size();
  return cat;
}

MarkedGraph make_single_edge() {
  return MarkedGraph::build({"N", "F"}, {{"a", "N", "F"}}, "N", "F");
}

MarkedGraph make_cone() {
  return MarkedGraph::build({"N", "A", "F"},
                            {{"1", "N", "F"}, {"2", "N", "A"}, {"3", "N", "A"}, {"4", "A", "F"}},
                            "N", "F");
}

MarkedGraph make_losange() {
  return MarkedGraph::build(
      {"N", "P2", "P5", "F"},
      {{"1", "N", "P2"}, {"2", "P2", "F"}, {"3", "P2", "P5"}, {"4", "N", "P5"}, {"5", "P5", "F"}},
      "N", "F");
}

MarkedGraph make_two_paths(int p, int q) {
  if (p < 1 || q < 1) throw GraphError("path lengths must be positive");
  std::vector<std::string> nodes{"N", "F"};
  std::vector<MarkedGraph::EdgeSpec> edges;
  auto arm = [&](char tag, int len) {
    std::string prev = "N";
    for (int k = 1; k <= len; ++k) {
      std::string next = k == len ? "F" : std::string(1, tag) + "_" + std::to_string(k);
      if (k != len) nodes.push_back(next);
      edges.push_back({std::string(1, tag) + std::to_string(k), prev, next});
      prev = next;
    }
  };
  arm('a', p);
  arm('b', q);
  return MarkedGraph::build(std::move(nodes), std::move(edges), "N", "F");
}

MarkedGraph make_nest_food_bundle(int count) {
  if (count < 1) throw GraphError("bundle needs at least one edge");
  std::vector<MarkedGraph::EdgeSpec> edges;
  for (int k = 1; k <= count; ++k) edges.push_back({"d" + std::to_string(k), "N", "F"});
  return MarkedGraph::build({"N", "F"}, std::move(edges), "N", "F");
}

MarkedGraph make_random_tree_like(int depth, Rng& rng, int max_children, int direct_edges) {
  if (depth < 1) throw GraphError("tree depth must be at least 1");
  if (max_children < 1) throw GraphError("max_children must be at least 1");
  if (direct_edges < 1) throw GraphError("need at least one direct edge");

  std::vector<std::string> nodes{"N", "F"};
  std::vector<MarkedGraph::EdgeSpec> edges;
  for (int k = 1; k <= direct_edges; ++k)
    edges.push_back({direct_edges == 1 ? "a" : "a" + std::to_string(k), "N", "F"});

  std::size_t next_edge = 1;
  auto add_edge = [&](const std::string& u, const std::string& v) {
    edges.push_back({"e" + std::to_string(next_edge++), u, v});
  };

  std::vector<std::string> level{"N"};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::string> children;
    for (std::size_t i = 0; i < level.size(); ++i) {
      // The first node of each level always branches so the tree reaches `depth`.
      const std::uint64_t lo = (i == 0 || d == 0) ? 1 : 0;
      const auto k = lo + rng.below(static_cast<std::uint64_t>(max_children) + 1 - lo);
      if (k == 0) {
        add_edge(level[i], "F");
        continue;
      }
      for (std::uint64_t c = 0; c < k; ++c) {
        std::string child = "T" + std::to_string(nodes.size() - 1);
        nodes.push_back(child);
        add_edge(level[i], child);
        children.push_back(std::move(child));
      }
    }
    level = std::move(children);
  }
  for (const auto& leaf : level) add_edge(leaf, "F");
  return MarkedGraph::build(std::move(nodes), std::move(edges), "N", "F");
}

}  // namespace antflow
