#include "tracelens/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "tracelens/error.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/random.hpp"

namespace tracelens {

LabeledDag skip_graph(std::size_t n, std::span<const std::size_t> skips, std::size_t label_period) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "skip graph needs at least one vertex");
  std::vector<std::size_t> offsets(skips.begin(), skips.end());
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  for (std::size_t s : offsets) {
    if (s == 0 || s >= n) {
      throw Error(ErrorCode::invalid_argument, "skip offsets must lie in [1, n)");
    }
  }
  std::vector<Vertex> vertices(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<Label>(label_period ? i % label_period : i);
    vertices[i] = {label, static_cast<double>(i), static_cast<double>(i), "skip"};
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s : offsets) {
      if (i + s < n) edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + s)});
    }
  }
  return LabeledDag(std::move(vertices), std::move(edges));
}

LabeledDag random_dag(std::size_t n, double edge_prob, std::uint64_t seed, std::size_t alphabet) {
  std::mt19937_64 rng(mix64(seed));
  std::vector<Vertex> vertices(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<Label>(alphabet ? rng() % alphabet : i);
    vertices[i] = {label, static_cast<double>(i), static_cast<double>(i), "rand"};
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (to_unit_interval(rng()) < edge_prob) {
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j)});
      }
    }
  }
  return LabeledDag(std::move(vertices), std::move(edges));
}

std::uint64_t count_label_sequence(const LabeledDag& dag, std::span<const Label> labels) {
  if (labels.empty()) return 0;
  const std::size_t n = dag.vertex_count();
  // ways[v] = number of paths starting at v that spell labels[k..].
  std::vector<std::uint64_t> ways(n, 0), next(n, 0);
  for (std::size_t k = labels.size(); k-- > 0;) {
    for (VertexId v = 0; v < n; ++v) {
      if (dag.label(v) != labels[k]) {
        ways[v] = 0;
        continue;
      }
      if (k + 1 == labels.size()) {
        ways[v] = 1;
        continue;
      }
      std::uint64_t sum = 0;
      for (VertexId w : dag.out_edges(v)) {
        if (__builtin_add_overflow(sum, next[w], &sum)) {
          throw Error(ErrorCode::count_overflow, "label sequence count exceeds 64 bits");
        }
      }
      ways[v] = sum;
    }
    std::swap(ways, next);
  }
  std::uint64_t total = 0;
  for (std::uint64_t w : next) {
    if (__builtin_add_overflow(total, w, &total)) {
      throw Error(ErrorCode::count_overflow, "label sequence count exceeds 64 bits");
    }
  }
  return total;
}

namespace {

class ZipfLabels {
public:
  ZipfLabels(std::size_t alphabet, double exponent) : cumulative_(alphabet) {
    double sum = 0.0;
    for (std::size_t r = 0; r < alphabet; ++r) {
      sum += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_[r] = sum;
    }
    for (double& c : cumulative_) c /= sum;
  }

  Label draw(std::mt19937_64& rng) const {
    const double u = to_unit_interval(rng());
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<Label>(it - cumulative_.begin());
  }

private:
  std::vector<double> cumulative_;
};

LabeledDag planted_attempt(const PlantedSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  const ZipfLabels zipf(spec.alphabet_size, spec.zipf_exponent);
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  const std::size_t b = spec.background_vertices;
  for (std::size_t i = 0; i < b; ++i) {
    vertices.push_back({zipf.draw(rng), static_cast<double>(i), static_cast<double>(i), "bg"});
  }
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t s = 1; s <= spec.window && i + s < b; ++s) {
      if (to_unit_interval(rng()) < spec.edge_prob) {
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + s)});
      }
    }
  }
  double time = static_cast<double>(b);
  for (std::size_t k = 0; k < spec.plants.size(); ++k) {
    const Plant& plant = spec.plants[k];
    const std::string tag = "plant" + std::to_string(k);
    for (std::uint64_t copy = 0; copy < plant.multiplicity; ++copy) {
      for (std::size_t j = 0; j < plant.labels.size(); ++j) {
        if (j > 0) {
          edges.push_back({static_cast<VertexId>(vertices.size() - 1),
                           static_cast<VertexId>(vertices.size())});
        }
        vertices.push_back({plant.labels[j], time, time, tag});
        time += 1.0;
      }
    }
  }
  return LabeledDag(std::move(vertices), std::move(edges));
}

}  // namespace

PlantedDag planted_dag(const PlantedSpec& spec) {
  if (spec.alphabet_size == 0) {
    throw Error(ErrorCode::invalid_argument, "background alphabet must be non-empty");
  }
  for (const Plant& plant : spec.plants) {
    if (plant.labels.empty() || plant.multiplicity == 0) {
      throw Error(ErrorCode::invalid_argument, "plants need a non-empty trace and multiplicity");
    }
  }
  for (unsigned attempt = 0; attempt < std::max(1u, spec.max_attempts); ++attempt) {
    const std::uint64_t seed = attempt == 0 ? spec.seed : derive_seed(spec.seed, attempt);
    PlantedDag result{planted_attempt(spec, seed), {}, attempt + 1};
    bool ok = true;
    for (const Plant& plant : spec.plants) {
      const std::uint64_t exact = count_label_sequence(result.dag, plant.labels);
      result.multiplicities.push_back(exact);
      const double target = static_cast<double>(plant.multiplicity);
      if (std::abs(static_cast<double>(exact) - target) > 0.1 * target) ok = false;
    }
    if (ok) return result;
  }
  throw Error(ErrorCode::infeasible_spec,
              "could not keep planted multiplicities within 10% after " +
                  std::to_string(spec.max_attempts) + " attempts");
}

BenchReport bench_compare(const LabeledDag& dag, unsigned max_length, double epsilon,
                          double oversampling, std::uint64_t seed, const MineOptions& options,
                          std::uint64_t limit) {
  using clock = std::chrono::steady_clock;
  const PathCounts counts = count_traces(dag, max_length);
  BenchReport report;
  report.total_traces = total_traces(counts);
  if (report.total_traces > limit) {
    throw Error(ErrorCode::too_many_traces,
                std::to_string(report.total_traces) + " traces exceed the enumeration limit of " +
                    std::to_string(limit));
  }

  auto start = clock::now();
  std::uint64_t checksum = 0;
  report.enumerated = all_traces(dag, max_length, options.hasher,
                                 [&checksum](std::span<const Label>, TraceKey key) {
                                   checksum ^= key.value;
                                 });
  report.enumeration_seconds = std::chrono::duration<double>(clock::now() - start).count();

  start = clock::now();
  const MiningReport mined = mine_frequent(dag, counts, epsilon, oversampling, seed, options);
  report.mining_seconds = std::chrono::duration<double>(clock::now() - start).count();

  report.p = mined.p;
  report.expected_samples = mined.p * static_cast<double>(report.total_traces);
  report.first_pass_samples = mined.first_pass_samples;
  report.second_pass_samples = mined.second_pass_samples;
  report.reported = mined.reported.size();
  const auto total = static_cast<double>(report.total_traces);
  report.ratio = mined.first_pass_samples ? total / static_cast<double>(mined.first_pass_samples)
                                          : 0.0;
  const std::uint64_t touched = mined.first_pass_samples + mined.second_pass_samples;
  report.touched_ratio = touched ? total / static_cast<double>(touched) : 0.0;
  return report;
}

}  // namespace tracelens
