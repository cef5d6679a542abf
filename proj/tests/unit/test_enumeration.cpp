#include <doctest.h>

#include <random>
#include <set>
#include <unordered_set>

#include "oracles.hpp"
#include "tracelens/enumeration.hpp"
#include "tracelens/error.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/synth.hpp"

using namespace tracelens;
using namespace tracelens::testing;

namespace {

std::vector<Trace> collect(const LabeledDag& dag, unsigned m) {
  std::vector<Trace> out;
  all_traces(dag, m, TraceHasher{}, [&](std::span<const Label> labels, TraceKey) {
    out.emplace_back(labels.begin(), labels.end());
  });
  return out;
}

}  // namespace

TEST_CASE("all_traces on small graphs") {
  CHECK(collect(make_dag({7}, {}), 3) == std::vector<Trace>{{7}});
  CHECK(collect(chain({1, 2}), 2) == std::vector<Trace>{{1}, {1, 2}, {2}});
  const auto dag = browsing_dag();
  CHECK(collect(dag, 1).size() == dag.vertex_count());
}

TEST_CASE("exact_frequencies matches the recursive oracle") {
  const auto browsing = browsing_dag();
  for (unsigned m = 1; m <= 5; ++m) {
    CHECK(exact_frequencies(browsing, m) == brute_force_frequencies(browsing, m));
  }
  std::mt19937 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto dag = random_dag(1 + rng() % 12, (rng() % 80) / 100.0, rng(), 1 + rng() % 4);
    const unsigned m = 1 + rng() % 5;
    CHECK(exact_frequencies(dag, m) == brute_force_frequencies(dag, m));
    CHECK(all_traces(dag, m, TraceHasher{}, [](auto, auto) {}) ==
          total_traces(count_traces(dag, m)));
  }
}

TEST_CASE("repeated labels") {
  const auto freq = exact_frequencies(chain({4, 4}), 2);
  CHECK(freq == std::map<Trace, std::uint64_t>{{{4}, 2}, {{4, 4}, 1}});
}

TEST_CASE("fingerprint") {
  const TraceHasher hasher(123);
  CHECK(hasher.base() >= 2);
  CHECK(hasher.base() < TraceHasher::modulus);
  const Label one[] = {41};
  CHECK(hasher.key_of(one).value == 42);

  const Label abc[] = {1, 2, 3};
  const TraceKey incremental = hasher.extend(hasher.extend(hasher.extend({0}, 1), 2), 3);
  CHECK(hasher.key_of(abc) == incremental);
  const unsigned __int128 b = hasher.base();
  const unsigned __int128 q = TraceHasher::modulus;
  const auto expected = static_cast<std::uint64_t>(((2 * b % q + 3) * b % q + 4) % q);
  CHECK(incremental.value == expected);

  SUBCASE("keys depend on labels only") {
    const auto dag = make_dag({5, 6, 5, 6}, {{0, 1}, {2, 3}});
    std::vector<TraceKey> keys;
    all_traces(dag, 2, hasher, [&](std::span<const Label> labels, TraceKey key) {
      if (labels.size() == 2) keys.push_back(key);
    });
    REQUIRE(keys.size() == 2);
    CHECK(keys[0] == keys[1]);
  }

  SUBCASE("no collisions among distinct traces of a random DAG") {
    const auto dag = random_dag(40, 0.2, 5, 6);
    std::map<TraceKey, Trace> seen;
    all_traces(dag, 5, hasher, [&](std::span<const Label> labels, TraceKey key) {
      const Trace t(labels.begin(), labels.end());
      auto [it, inserted] = seen.emplace(key, t);
      CHECK(it->second == t);
    });
    CHECK(seen.size() == exact_frequencies(dag, 5).size());
  }
}

TEST_CASE("exact_key_frequencies agrees with exact_frequencies") {
  const auto dag = random_dag(30, 0.25, 8, 3);
  const TraceHasher hasher;
  const auto by_key = exact_key_frequencies(dag, 4, hasher);
  const auto by_trace = exact_frequencies(dag, 4);
  REQUIRE(by_key.size() == by_trace.size());
  for (const auto& [trace, count] : by_trace) CHECK(by_key.at(hasher.key_of(trace)) == count);
}

TEST_CASE("enumeration limit") {
  const std::vector<std::size_t> skips{1, 2, 3};
  try {
    exact_frequencies(skip_graph(16, skips), 16, 1000);
    FAIL("expected too-many-traces");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_many_traces);
  }
}

TEST_CASE("planted chains are counted exactly") {
  PlantedSpec spec;
  spec.plants = {{{5, 9, 2}, 40}};
  spec.background_vertices = 200;
  spec.seed = 4;
  const auto planted = planted_dag(spec);
  const auto freq = exact_frequencies(planted.dag, 3);
  CHECK(freq.at({5, 9, 2}) == planted.multiplicities[0]);
  CHECK(count_label_sequence(planted.dag, std::vector<Label>{5, 9, 2}) == freq.at({5, 9, 2}));
}
