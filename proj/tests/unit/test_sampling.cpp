#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "tracelens/enumeration.hpp"
#include "tracelens/error.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/sampling.hpp"
#include "tracelens/synth.hpp"

using namespace tracelens;
using namespace tracelens::testing;

namespace {

std::vector<Trace> sample_once(const LabeledDag& dag, unsigned m, double p, std::uint64_t seed,
                               SamplerKind kind = SamplerKind::exact, unsigned threads = 1) {
  const auto counts = count_traces(dag, m);
  const auto plan = prepare_plan(dag, counts, p);
  std::vector<Trace> out;
  sample_traces(dag, counts, plan, seed,
                [&](std::span<const Label> labels, TraceKey) { out.emplace_back(labels.begin(), labels.end()); },
                {kind, threads, TraceHasher{}});
  return out;
}

}  // namespace

TEST_CASE("choose_p") {
  CHECK(choose_p(1000, 10) == doctest::Approx(0.01));
  CHECK(choose_p(10, 10) == 1.0);
  CHECK(choose_p(168000, 10) == doctest::Approx(5.952e-5).epsilon(1e-3));
  CHECK(choose_p(5, 10, true) == 1.0);
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_dag;
  };
  CHECK(code_of([] { choose_p(5, 10); }) == ErrorCode::threshold_too_small);
  CHECK(code_of([] { choose_p(0, 10); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { choose_p(100, 0.5); }) == ErrorCode::invalid_argument);
}

TEST_CASE("sampling plan") {
  const auto dag = chain({1, 2});
  const auto counts = count_traces(dag, 2);
  const auto half = prepare_plan(dag, counts, 0.5);
  CHECK(std::exp(half.log_no_sample(1, 2)) == doctest::Approx(0.5));
  CHECK(std::exp(half.log_no_sample(0, 2)) == doctest::Approx(0.25));
  CHECK(half.keep_none(3) == doctest::Approx(0.125));
  CHECK(half.children(0, 2).child_count() == 1);
  CHECK(half.children(1, 2).child_count() == 0);
  const auto certain = prepare_plan(dag, counts, 1.0);
  CHECK(certain.certain());
  CHECK(std::exp(certain.log_no_sample(0, 2)) == 0.0);
}

TEST_CASE("select_children edge cases") {
  SamplerRng rng(1);
  std::vector<std::uint32_t> out;
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const auto table = selection_table(zero);
  for (int i = 0; i < 100; ++i) select_children({table, false}, rng, out);
  CHECK(out.empty());

  const std::vector<double> one{1.0, 1.0};
  const auto all = selection_table(one);
  select_children({all, true}, rng, out);
  CHECK(out == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("select_children matches independent coin flips") {
  const std::vector<double> probs{0.2, 0.5, 0.7};
  const auto table = selection_table(probs);
  SamplerRng rng(7);
  const int draws = 100000;
  std::map<unsigned, int> subsets;
  std::vector<std::uint32_t> out;
  for (int i = 0; i < draws; ++i) {
    out.clear();
    select_children({table, false}, rng, out);
    unsigned mask = 0;
    for (auto j : out) mask |= 1u << j;
    ++subsets[mask];
  }
  for (unsigned mask = 0; mask < 8; ++mask) {
    double expect = 1.0;
    for (unsigned j = 0; j < 3; ++j) expect *= (mask >> j & 1) ? probs[j] : 1.0 - probs[j];
    const double rate = static_cast<double>(subsets[mask]) / draws;
    CHECK(std::abs(rate - expect) <= 4.0 * rate_sigma(expect, draws));
  }
}

TEST_CASE("select_children_conditioned matches coin flips given a non-empty outcome") {
  // Children with probabilities {0.3, 0.6} plus the vertex's own trace at p = 0.25.
  const std::vector<double> probs{0.3, 0.6};
  const double p = 0.25;
  const auto table = selection_table(probs);
  const double none = (1 - probs[0]) * (1 - probs[1]) * (1 - p);
  SamplerRng rng(99);
  const int draws = 100000;
  std::map<unsigned, int> subsets;  // bit 2 = forced own trace
  std::vector<std::uint32_t> out;
  for (int i = 0; i < draws; ++i) {
    out.clear();
    const bool forced = select_children_conditioned({table, false}, std::log(none), rng, out);
    unsigned mask = forced ? 4u : 0u;
    for (auto j : out) mask |= 1u << j;
    CHECK((forced == out.empty()));
    ++subsets[mask];
  }
  // Children-only subsets, with the vertex trace's own coin folded in.
  for (unsigned mask = 1; mask < 4; ++mask) {
    double expect = 1.0;
    for (unsigned j = 0; j < 2; ++j) expect *= (mask >> j & 1) ? probs[j] : 1.0 - probs[j];
    expect /= 1.0 - none;
    const double rate = static_cast<double>(subsets[mask]) / draws;
    CHECK(std::abs(rate - expect) <= 4.0 * rate_sigma(expect, draws));
  }
  const double forced = (1 - probs[0]) * (1 - probs[1]) * p / (1.0 - none);
  CHECK(std::abs(subsets[4] / static_cast<double>(draws) - forced) <= 4.0 * rate_sigma(forced, draws));
}

TEST_CASE("single vertex is sampled at rate p") {
  const auto dag = make_dag({3}, {});
  const int runs = 100000;
  int hits = 0;
  for (int s = 0; s < runs; ++s) hits += static_cast<int>(sample_once(dag, 1, 0.3, s).size());
  CHECK(std::abs(hits / static_cast<double>(runs) - 0.3) <= 4.0 * rate_sigma(0.3, runs));
}

TEST_CASE("exact sampler: marginals and pairwise independence on a chain") {
  const auto dag = chain({1, 2, 3});
  const double p = 0.2;
  const int runs = 40000;
  std::map<Trace, int> hits;
  int pair_hits = 0;
  for (int s = 0; s < runs; ++s) {
    const auto traces = sample_once(dag, 3, p, 1000 + s);
    std::set<Trace> seen(traces.begin(), traces.end());
    CHECK(seen.size() == traces.size());
    for (const auto& t : traces) ++hits[t];
    if (seen.count({1, 2, 3}) && seen.count({1})) ++pair_hits;
  }
  REQUIRE(hits.size() == 6);
  for (const auto& [trace, n] : hits) {
    CHECK(std::abs(n / static_cast<double>(runs) - p) <= 4.0 * rate_sigma(p, runs));
  }
  CHECK(std::abs(pair_hits / static_cast<double>(runs) - p * p) <= 4.0 * rate_sigma(p * p, runs));
}

TEST_CASE("exact sampler: per-trace rates on the browsing graph") {
  const auto dag = browsing_dag();
  const double p = 0.1;
  const int runs = 30000;
  std::map<Trace, int> hits;
  for (int s = 0; s < runs; ++s) {
    for (const auto& t : sample_once(dag, 4, p, 77 + s)) ++hits[t];
  }
  for (const auto& [trace, freq] : brute_force_frequencies(dag, 4)) {
    const double expect = p * static_cast<double>(freq);
    const double sd = std::sqrt(freq * p * (1 - p) / runs);
    CHECK(std::abs(hits[trace] / static_cast<double>(runs) - expect) <= 4.0 * sd);
  }
}

TEST_CASE("p = 1 emits every trace for both samplers") {
  const auto dag = browsing_dag();
  std::map<Trace, std::uint64_t> expected = brute_force_frequencies(dag, 4);
  for (auto kind : {SamplerKind::exact, SamplerKind::paper}) {
    std::map<Trace, std::uint64_t> got;
    for (auto& t : sample_once(dag, 4, 1.0, 5, kind)) ++got[t];
    CHECK(got == expected);
  }
}

TEST_CASE("literal sampler emits at least one trace per entered start vertex") {
  const std::vector<std::size_t> skips{1, 2, 3};
  const auto dag = skip_graph(16, skips, 2);
  const auto counts = count_traces(dag, 8);
  const auto plan = prepare_plan(dag, counts, 0.01);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto stats = sample_traces_paper(dag, counts, plan, seed, [](auto, auto) {});
    CHECK(stats.emitted >= stats.top_level_calls);
  }
}

TEST_CASE("output is identical for every thread count") {
  const auto dag = random_dag(300, 0.03, 12, 5);
  for (auto kind : {SamplerKind::exact, SamplerKind::paper}) {
    const auto one = sample_once(dag, 6, 0.05, 42, kind, 1);
    CHECK(!one.empty());
    CHECK(sample_once(dag, 6, 0.05, 42, kind, 3) == one);
    CHECK(sample_once(dag, 6, 0.05, 42, kind, 8) == one);
  }
}

TEST_CASE("mean sample size is p |S_m|") {
  const std::vector<std::size_t> skips{1, 2, 3};
  const auto dag = skip_graph(16, skips);
  const auto counts = count_traces(dag, 16);
  const double p = 0.01;
  const auto plan = prepare_plan(dag, counts, p);
  const int runs = 300;
  double sum = 0;
  for (int s = 0; s < runs; ++s) {
    sum += static_cast<double>(sample_traces_exact(dag, counts, plan, s, [](auto, auto) {}).emitted);
  }
  const double n = 27692;
  const double sd = std::sqrt(n * p * (1 - p) / runs);
  CHECK(std::abs(sum / runs - n * p) <= 4.0 * sd);
}
