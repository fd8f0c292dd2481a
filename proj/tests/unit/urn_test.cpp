#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "antflow/stats.hpp"
#include "antflow/urn.hpp"
#include "antflow/walk.hpp"

using namespace antflow;
using doctest::Approx;

TEST_CASE("constant urns") {
  Rng rng(1, 0);
  const auto zero = simulate_urn({urn_functions::constant(0.0), 1, 0}, 100, rng);
  CHECK(zero.size() == 101);
  CHECK(std::all_of(zero.begin(), zero.end(), [](auto x) { return x == 1; }));
  const auto one = simulate_urn({urn_functions::constant(1.0), 3, 5}, 100, rng);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == 3 + i);
}

TEST_CASE("urn validation") {
  Rng rng(1, 0);
  CHECK_THROWS(simulate_urn({urn_functions::constant(1.5), 1, 0}, 10, rng));
  CHECK_THROWS(simulate_urn({urn_functions::polya(), 0, 0}, 10, rng));
  CHECK_THROWS(simulate_urn({urn_functions::polya(), 5, 1}, 10, rng));
  CHECK_THROWS(simulate_urn({UrnFunction{}, 1, 0}, 10, rng));
  CHECK_THROWS(urn_functions::ratio(0.0));
}

TEST_CASE("tabulated functions") {
  const TabulatedFunction t({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(t(0.25) == Approx(0.5));
  CHECK(t(-1.0) == 0.0);
  CHECK(t(0.75) == Approx(0.5));
  const auto s = TabulatedFunction::sample(urn_functions::ratio(2.0), 1001);
  CHECK(s(0.5) == Approx(0.5));
  CHECK_THROWS(TabulatedFunction({0.0, 0.0}, {1.0, 1.0}));
}

TEST_CASE("polya urn limit is uniform") {
  const auto finals = urn_final_values({urn_functions::polya()}, 10000, 10000, 3);
  const auto ks = stats::ks_uniform(finals);
  CHECK(ks.pass);
  CHECK(ks.critical == Approx(1.6276 / 100.0));
}

TEST_CASE("ratio urn concentrates at 1 - 1/q") {
  const auto finals = urn_final_values({urn_functions::ratio(2.0)}, 1000000, 20, 4);
  for (double x : finals) CHECK(std::abs(x - 0.5) < 0.02);
}

TEST_CASE("stable fixed points") {
  const auto grid = uniform_grid(1001);
  const auto r = stable_fixed_points(urn_functions::ratio(2.0), grid);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == Approx(0.5).epsilon(1e-12));

  // x / (x + 0.9): 0 is repelling (slope 1/0.9), 0.1 attracts.
  const auto s = stable_fixed_points(urn_functions::shifted(0.1), grid);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == Approx(0.1).epsilon(1e-9));

  CHECK(stable_fixed_points(urn_functions::polya(), grid).size() == grid.size());

  // Slope (k+1)/k > 1 at 0 makes 0 unstable; 1 is the only stable point.
  const auto d = stable_fixed_points(urn_functions::distance_one_bound(2.0), grid);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Approx(1.0));
}

TEST_CASE("domination: identical urns") {
  const UrnSpec spec{urn_functions::ratio(2.0)};
  const std::vector<std::uint64_t> times{100, 1000, 5000};
  std::vector<std::vector<std::uint64_t>> paths;
  for (std::uint64_t r = 0; r < 400; ++r) {
    Rng rng(99, r);
    const auto full = simulate_urn(spec, 5000, rng);
    paths.push_back({full[100], full[1000], full[5000]});
  }
  const auto rep = domination_check(spec, paths, times, 400, 7);
  CHECK_FALSE(rep.any_violation);
  CHECK(rep.rows.size() == 3);
  CHECK_THROWS(domination_check(spec, paths, std::vector<std::uint64_t>{100, 1000}, 10, 7));
}

TEST_CASE("domination: first edge of the (2,2) paths") {
  const auto g = make_two_paths(2, 2);
  const auto a1 = classify(g).canonical_edges[0];
  const std::vector<std::uint64_t> times{100, 1000, 4000};
  std::vector<std::vector<std::uint64_t>> paths;
  for (std::uint64_t r = 0; r < 300; ++r) {
    std::vector<std::uint64_t> row;
    ProcessOptions opts;
    opts.observer = [&](std::uint64_t n, std::span<const std::uint64_t> w, const TraceRecord&) {
      if (std::find(times.begin(), times.end(), n) != times.end()) row.push_back(w[a1]);
    };
    run_process(g, times.back(), 21, r, opts);
    paths.push_back(row);
  }
  const auto rep = domination_check({urn_functions::ratio(2.0)}, paths, times, 300, 8);
  CHECK_FALSE(rep.any_violation);
}

TEST_CASE("stats helpers") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::stddev(x) == Approx(std::sqrt(5.0 / 3)));
  CHECK(stats::quantile_sorted(x, 0.5) == 2.5);
  CHECK(stats::quantile_sorted(x, 0.0) == 1.0);
  CHECK(stats::quantile_sorted(x, 1.0) == 4.0);
  CHECK(stats::dkw_epsilon(100, 0.05) == Approx(std::sqrt(std::log(2 / 0.05) / 200)));
  CHECK_FALSE(stats::ks_uniform(std::vector<double>(100, 0.9)).pass);
}
