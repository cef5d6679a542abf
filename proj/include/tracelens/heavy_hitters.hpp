#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tracelens/dag.hpp"
#include "tracelens/enumeration.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/sampling.hpp"

namespace tracelens {

struct Candidate {
  TraceKey key;
  Trace labels;          // as first seen; empty if the stream carried keys only
  std::uint64_t count;   // Misra-Gries lower bound on the true stream count
};

// Misra-Gries summary with at most `capacity` counters. Any item occurring
// more than n/capacity times in a stream of n items is guaranteed to hold a
// counter at the end, and its counter underestimates the true count by at
// most n/capacity.
class CounterTable {
public:
  explicit CounterTable(std::size_t capacity);

  // Present: +1. Absent with room: insert at 1. Absent and full: every
  // counter -1, zeroed counters evicted, the item is dropped.
  void update(TraceKey key, std::span<const Label> labels = {});

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t peak_size() const noexcept { return peak_size_; }
  std::uint64_t consumed() const noexcept { return consumed_; }

  // Current entries ordered by count (descending), then key.
  std::vector<Candidate> candidates() const;

private:
  struct Entry {
    std::uint64_t count;
    Trace labels;
  };
  std::size_t capacity_;
  std::uint64_t consumed_ = 0;
  std::size_t peak_size_ = 0;
  std::unordered_map<TraceKey, Entry, TraceKeyHash> entries_;
};

inline void mg_update(CounterTable& table, TraceKey key, std::span<const Label> labels = {}) {
  table.update(key, labels);
}
inline std::vector<Candidate> mg_candidates(const CounterTable& table) {
  return table.candidates();
}

enum class SecondPassMode {
  regenerate,  // replay the first sample with the same seed
  fresh,       // count in an independent sample
};

struct MineOptions {
  SecondPassMode mode = SecondPassMode::regenerate;
  SamplerKind sampler = SamplerKind::exact;
  unsigned threads = 1;
  TraceHasher hasher{};
};

// Seed used for the independent sample in fresh mode.
std::uint64_t fresh_pass_seed(std::uint64_t seed);

// Exact occurrence counts of `candidates` in a second sample. In
// regenerate mode this is the first-pass stream itself, which requires the
// first-pass seed; a missing seed is Error(mode_mismatch).
std::map<TraceKey, std::uint64_t> exact_second_pass(std::span<const Candidate> candidates,
                                                    const LabeledDag& dag,
                                                    const PathCounts& counts,
                                                    const SamplingPlan& plan,
                                                    std::optional<std::uint64_t> seed,
                                                    const MineOptions& options,
                                                    std::uint64_t* stream_length = nullptr);

struct FrequentTrace {
  Trace labels;
  TraceKey key;
  std::uint64_t sample_count = 0;
  double estimated_frequency = 0.0;  // sample_count / p
};

struct MiningReport {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  unsigned max_length = 0;
  std::uint64_t total_traces = 0;
  double epsilon = 0.0;
  double oversampling = 0.0;
  double p = 0.0;
  std::size_t capacity = 0;               // Misra-Gries counters
  std::uint64_t first_pass_samples = 0;
  std::uint64_t second_pass_samples = 0;
  std::size_t candidate_count = 0;        // Misra-Gries survivors
  std::size_t peak_table_size = 0;
  std::uint64_t report_threshold = 0;     // reported iff sample_count > this
  std::vector<FrequentTrace> reported;    // by sample count (desc), then labels
};

// Sample with p = C/epsilon, keep Misra-Gries counters with capacity
// max(1, ceil(2 p |S_m| / C)), recount the survivors exactly, and report
// those with more than floor(C/2) samples.
MiningReport mine_frequent(const LabeledDag& dag, const PathCounts& counts, double epsilon,
                           double oversampling, std::uint64_t seed,
                           const MineOptions& options = {});
MiningReport mine_frequent(const LabeledDag& dag, unsigned max_length, double epsilon,
                           double oversampling, std::uint64_t seed,
                           const MineOptions& options = {});

struct TopKReport {
  std::vector<FrequentTrace> traces;  // at most k, by estimated frequency
  unsigned rounds = 0;
  MiningReport last;
};

// Threshold search: start at epsilon = |S_m|/2 and halve (never below C)
// until mine_frequent reports at least k traces. Error(budget_exceeded) if
// epsilon = C still reports fewer than k.
TopKReport top_k(const LabeledDag& dag, unsigned max_length, std::size_t k,
                 double oversampling, std::uint64_t seed, const MineOptions& options = {});

}  // namespace tracelens
