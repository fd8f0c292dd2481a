#include <doctest.h>

#include "antflow/electrical.hpp"
#include "antflow/rng.hpp"
#include "antflow/walk.hpp"
#include "oracles.hpp"

using namespace antflow;
using doctest::Approx;

namespace {

MarkedGraph chain(int k) {
  std::vector<std::string> nodes{"N", "F"};
  std::vector<MarkedGraph::EdgeSpec> edges;
  std::string prev = "N";
  for (int i = 1; i < k; ++i) {
    nodes.push_back("c" + std::to_string(i));
    edges.push_back({"e" + std::to_string(i), prev, nodes.back()});
    prev = nodes.back();
  }
  edges.push_back({"e" + std::to_string(k), prev, "F"});
  return MarkedGraph::build(nodes, edges, "N", "F");
}

}  // namespace

TEST_CASE("stationary measure") {
  const auto cone = make_cone();
  const auto pi = stationary_measure(cone, WeightVector::ones(cone));
  CHECK(pi[cone.nest()] == 3.0);
  CHECK(pi[*cone.find_node("A")] == 3.0);
  CHECK(pi[cone.food()] == 2.0);

  const auto zero = stationary_measure(cone, WeightVector::filled(4, 0.0));
  for (double v : zero) CHECK(v == 0.0);

  const auto single = make_single_edge();
  const auto half = stationary_measure(single, WeightVector{0.5});
  CHECK(half[single.nest()] == 0.5);
  CHECK(half[single.food()] == 0.5);
}

TEST_CASE("conductance of series and parallel networks") {
  const auto two = chain(2);
  CHECK(effective_conductance(two, WeightVector{0.3, 0.7}, two.nest(), two.food()) ==
        Approx(oracle::series(0.3, 0.7)).epsilon(1e-12));

  const auto bundle = make_nest_food_bundle(2);
  CHECK(effective_conductance(bundle, WeightVector{1.0, 1.0}, bundle.nest(), bundle.food()) == Approx(2.0));

  for (auto [k, l] : {std::pair{1, 1}, {2, 3}, {3, 5}}) {
    const auto g = make_two_paths(k, l);
    CHECK(effective_conductance(g, WeightVector::ones(g), g.nest(), g.food()) ==
          Approx(1.0 / k + 1.0 / l).epsilon(1e-12));
  }

  // k parallel edges N-P followed by l parallel edges P-F.
  for (auto [k, l] : {std::pair{1, 1}, {2, 3}, {3, 5}}) {
    std::vector<MarkedGraph::EdgeSpec> edges;
    for (int i = 0; i < k; ++i) edges.push_back({"n" + std::to_string(i), "N", "P"});
    for (int i = 0; i < l; ++i) edges.push_back({"f" + std::to_string(i), "P", "F"});
    const auto g = MarkedGraph::build({"N", "P", "F"}, edges, "N", "F");
    CHECK(effective_conductance(g, WeightVector::ones(g), g.nest(), g.food()) ==
          Approx(oracle::series(k, l)).epsilon(1e-12));
  }

  // Cone: edge 1 in parallel with (2 || 3) in series with 4.
  const auto cone = make_cone();
  const WeightVector w{0.4, 0.2, 0.9, 0.5};
  const double expected = oracle::parallel(0.4, oracle::series(oracle::parallel(0.2, 0.9), 0.5));
  CHECK(effective_conductance(cone, w, cone.nest(), cone.food()) == Approx(expected).epsilon(1e-12));
  CHECK(effective_conductance(cone, WeightVector{0, 0, 0, 0.5}, cone.nest(), cone.food()) == 0.0);
  CHECK_THROWS(effective_conductance(cone, w, cone.nest(), cone.nest()));
}

TEST_CASE("green function against the Neumann series") {
  Rng rng(3, 0);
  for (const auto& g : {make_cone(), make_losange(), make_two_paths(2, 3)}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> w(g.edge_count());
      for (auto& x : w) x = rng.uniform(0.1, 1.0);
      const WeightVector wv(w);
      for (NodeIndex x = 0; x < g.node_count(); ++x)
        for (NodeIndex y = 0; y < g.node_count(); ++y) {
          if (x == g.food() || y == g.food()) continue;
          CHECK(green_function(g, wv, x, y) == Approx(oracle::green(g, wv, x, y)).epsilon(1e-10));
        }
    }
  }
}

TEST_CASE("green function reversibility") {
  Rng rng(5, 0);
  const auto g = make_losange();
  std::vector<double> w(5);
  for (auto& x : w) x = rng.uniform(0.1, 1.0);
  const WeightVector wv(w);
  const auto pi = stationary_measure(g, wv);
  for (NodeIndex x = 0; x < g.node_count(); ++x) {
    if (x == g.food()) continue;
    CHECK(green_function(g, wv, g.nest(), x) / pi[x] ==
          Approx(green_function(g, wv, x, g.nest()) / pi[g.nest()]).epsilon(1e-12));
  }
}

TEST_CASE("green function edge cases") {
  const auto single = make_single_edge();
  CHECK(green_function(single, WeightVector{1.0}, single.nest(), single.nest()) == 1.0);
  CHECK_THROWS_AS(green_function(single, WeightVector{1.0}, single.nest(), single.food()), GraphError);
  const auto cone = make_cone();
  CHECK_THROWS_AS(green_function(cone, WeightVector{0, 1, 1, 0}, cone.nest(), cone.nest()), DisconnectedError);
}

TEST_CASE("mean visits to the nest") {
  const auto single = make_single_edge();
  CHECK(returns_to_nest_mean(single, WeightVector{1.0}) == Approx(1.0));
  const auto g11 = chain(2);
  CHECK(returns_to_nest_mean(g11, WeightVector{1.0, 1.0}) == Approx(2.0));
}

TEST_CASE("visits to the nest match simulation") {
  for (const auto& g : {make_cone(), make_losange()}) {
    const auto w = WeightVector::ones(g);
    const double expected = returns_to_nest_mean(g, w);
    CHECK(expected == Approx(green_function(g, w, g.nest(), g.nest())));

    // Count visits to N along simulated walks: a visit starts each excursion.
    Rng rng(11, 0);
    const int walks = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < walks; ++i) {
      NodeIndex x = g.nest();
      int visits = 0;
      while (x != g.food()) {
        if (x == g.nest()) ++visits;
        const auto inc = g.incident(x);
        double total = 0.0;
        for (auto e : inc) total += w[e];
        double u = rng.uniform() * total;
        EdgeIndex pick = inc.back();
        for (auto e : inc) {
          if (u < w[e]) {
            pick = e;
            break;
          }
          u -= w[e];
        }
        x = g.edge(pick).other(x);
      }
      sum += visits;
      sum2 += static_cast<double>(visits) * visits;
    }
    const double mean = sum / walks;
    const double se = std::sqrt((sum2 / walks - mean * mean) / walks);
    CHECK(std::abs(mean - expected) < 3 * se);
  }
}
