#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tracelens/error.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/synth.hpp"

using namespace tracelens;
using namespace tracelens::testing;

TEST_CASE("count_traces on small graphs") {
  SUBCASE("single vertex") {
    const auto counts = count_traces(make_dag({7}, {}), 4);
    CHECK(counts.count(0, 0) == 0);
    CHECK(counts.count(0, 4) == 1);
    CHECK(total_traces(counts) == 1);
  }
  SUBCASE("two-vertex chain") {
    const auto counts = count_traces(chain({1, 2}), 2);
    CHECK(counts.count(0, 2) == 2);
    CHECK(counts.count(1, 2) == 1);
    CHECK(total_traces(counts) == 3);
  }
  SUBCASE("three-vertex chain with m = 2") {
    CHECK(total_traces(count_traces(chain({1, 2, 3}), 2)) == 5);
    CHECK(total_traces(count_traces(chain({1, 2, 3}), 3)) == 6);
  }
  SUBCASE("browsing graph") {
    const auto dag = browsing_dag();
    for (unsigned m = 1; m <= 6; ++m) {
      CHECK(total_traces(count_traces(dag, m)) == brute_force_count(dag, m));
    }
  }
}

TEST_CASE("skip graph with 16 vertices has 27692 traces") {
  const std::vector<std::size_t> skips{1, 2, 3};
  const auto dag = skip_graph(16, skips);
  CHECK(total_traces(count_traces(dag, 16)) == 27692);
  CHECK(brute_force_count(dag, 16) == 27692);
}

TEST_CASE("count_traces matches path enumeration on random DAGs") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const double prob = (rng() % 100) / 100.0;
    const auto dag = random_dag(n, prob, rng());
    const unsigned m = 1 + rng() % 6;
    const auto counts = count_traces(dag, m);
    CHECK(total_traces(counts) == brute_force_count(dag, m));
    for (VertexId v = 0; v < n; ++v) {
      CHECK(counts.count(v, 1) == 1);
      for (unsigned i = 1; i <= m; ++i) CHECK(counts.count(v, i) >= counts.count(v, i - 1));
    }
  }
}

TEST_CASE("count_traces errors") {
  SUBCASE("cycle") {
    const auto dag = make_dag({1, 2}, {{0, 1}, {1, 0}});
    try {
      count_traces(dag, 3);
      FAIL("expected cycle-detected");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::cycle_detected);
    }
  }
  SUBCASE("overflow") {
    // Every vertex links to all later ones: 2^(n-1) paths from vertex 0.
    const auto dag = random_dag(80, 1.0, 1);
    try {
      count_traces(dag, 80);
      FAIL("expected count-overflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::count_overflow);
    }
  }
  SUBCASE("m = 0") { CHECK_THROWS_AS(count_traces(chain({1}), 0), Error); }
}
