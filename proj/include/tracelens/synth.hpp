#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tracelens/dag.hpp"
#include "tracelens/heavy_hitters.hpp"

namespace tracelens {

// Vertices 0..n-1 on a line with edges i -> i+s for every s in `skips`.
// Labels are the vertex index, or index % label_period when label_period > 0.
LabeledDag skip_graph(std::size_t n, std::span<const std::size_t> skips,
                      std::size_t label_period = 0);

// Edge i -> j (i < j) independently with probability edge_prob. Labels are
// uniform over [0, alphabet), or the vertex index when alphabet == 0.
LabeledDag random_dag(std::size_t n, double edge_prob, std::uint64_t seed,
                      std::size_t alphabet = 0);

// Number of paths whose trace equals `labels` exactly.
std::uint64_t count_label_sequence(const LabeledDag& dag, std::span<const Label> labels);

struct Plant {
  Trace labels;
  std::uint64_t multiplicity = 1;
};

struct PlantedSpec {
  std::vector<Plant> plants;
  std::size_t background_vertices = 0;
  std::size_t alphabet_size = 16;
  double zipf_exponent = 1.2;
  std::size_t window = 3;       // background edges reach up to this many vertices ahead
  double edge_prob = 0.5;
  std::uint64_t seed = 0;
  unsigned max_attempts = 16;
};

struct PlantedDag {
  LabeledDag dag;
  std::vector<std::uint64_t> multiplicities;  // exact count per plant
  unsigned attempts = 0;
};

// Background: a time-ordered line of vertices with Zipf-distributed labels
// and random short forward edges. Each plant is added as `multiplicity`
// disjoint chains. Regenerates the background (bounded by max_attempts)
// until every plant's exact multiplicity is within 10% of its target;
// otherwise Error(infeasible_spec).
PlantedDag planted_dag(const PlantedSpec& spec);

struct BenchReport {
  std::uint64_t total_traces = 0;
  std::uint64_t enumerated = 0;
  double enumeration_seconds = 0.0;
  double p = 0.0;
  double expected_samples = 0.0;         // p * |S_m|
  std::uint64_t first_pass_samples = 0;
  std::uint64_t second_pass_samples = 0;
  double mining_seconds = 0.0;
  double ratio = 0.0;                    // |S_m| / first-pass samples
  double touched_ratio = 0.0;            // |S_m| / (first + second pass samples)
  std::size_t reported = 0;
};

// Full enumeration versus the sampling pipeline on the same DAG. Throws
// Error(too_many_traces) when |S_m| exceeds `limit`.
BenchReport bench_compare(const LabeledDag& dag, unsigned max_length, double epsilon,
                          double oversampling, std::uint64_t seed,
                          const MineOptions& options = {},
                          std::uint64_t limit = default_enumeration_limit);

}  // namespace tracelens
