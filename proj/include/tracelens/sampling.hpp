#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tracelens/dag.hpp"
#include "tracelens/enumeration.hpp"
#include "tracelens/path_counting.hpp"

namespace tracelens {

// p = C / epsilon, where epsilon is an absolute occurrence count and C the
// expected number of samples of an epsilon-frequent trace. Requires
// epsilon >= C >= 1 unless `clamp` is set, in which case p is capped at 1.
double choose_p(double epsilon, double oversampling, bool clamp = false);

using SamplerRng = std::mt19937_64;

// Child-selection table for one (vertex, length) pair: log_q[j] is the log
// probability that none of the first j children is entered
// (log_q[0] = 0, non-increasing). `certain` marks the p = 1 case where
// every child is always entered.
struct ChildSelection {
  std::span<const double> log_q;
  bool certain = false;

  std::size_t child_count() const { return log_q.empty() ? 0 : log_q.size() - 1; }
};

// Builds log_q for children entered independently with the given
// probabilities. Each probability must be < 1 unless all equal 1.
std::vector<double> selection_table(std::span<const double> probabilities);

// Draws the set of children entered, distributed exactly as independent
// per-child coin flips: binary search for r over q_d..q_0, then again with
// r uniform in [0, q_{j1}], and so on. Appends child indices in increasing
// order to `out`.
void select_children(const ChildSelection& entry, SamplerRng& rng, std::vector<std::uint32_t>& out);

// As select_children, but conditioned on at least one trace in the subtree
// being sampled. `log_none` is the log probability that nothing in the
// subtree (children and the vertex's own trace) is sampled. Returns true
// when no child was chosen, in which case the vertex's own trace must be
// emitted.
bool select_children_conditioned(const ChildSelection& entry, double log_none, SamplerRng& rng,
                                 std::vector<std::uint32_t>& out);

// Precomputed selection tables for every (vertex, length) pair. A pure
// function of (dag, counts, p); immutable once built.
class SamplingPlan {
public:
  double p() const noexcept { return p_; }
  double log1mp() const noexcept { return log1mp_; }
  unsigned max_length() const noexcept { return max_length_; }
  bool certain() const noexcept { return p_ >= 1.0; }

  // Children of v evaluated with length budget i (so each child's subtree
  // has budget i - 1). Requires 1 <= i <= m.
  ChildSelection children(VertexId v, unsigned i) const;

  // log of (1-p)^count(v, i): probability that no trace of S_i(v) is sampled.
  double log_no_sample(VertexId v, unsigned i) const {
    return log_none_[static_cast<std::size_t>(i) * vertex_count_ + v];
  }

  // (1-p)^count computed in log space.
  double keep_none(std::uint64_t count) const;

private:
  friend SamplingPlan prepare_plan(const LabeledDag&, const PathCounts&, double);

  double p_ = 1.0;
  double log1mp_ = 0.0;
  unsigned max_length_ = 0;
  std::size_t vertex_count_ = 0;
  std::size_t stride_ = 0;                // |E| + |V|
  std::vector<std::size_t> row_start_;    // per vertex, offset of its log_q row
  std::vector<double> log_q_;             // m rows of stride_ entries
  std::vector<double> log_none_;          // (m + 1) * |V|
};

SamplingPlan prepare_plan(const LabeledDag& dag, const PathCounts& counts, double p);

enum class SamplerKind { exact, paper };

struct SampleOptions {
  SamplerKind kind = SamplerKind::exact;
  unsigned threads = 1;
  TraceHasher hasher{};
};

struct SampleStats {
  std::uint64_t emitted = 0;           // traces output
  std::uint64_t emitted_labels = 0;    // total length of traces output
  std::uint64_t top_level_calls = 0;   // start vertices entered
};

// Emits every trace of S_m independently with probability p. Start vertex
// v is entered with probability 1 - (1-p)^count(v, m), using a random
// stream derived from (seed, v); the output order is by start vertex and is
// identical for every thread count.
SampleStats sample_traces_exact(const LabeledDag& dag, const PathCounts& counts,
                                const SamplingPlan& plan, std::uint64_t seed,
                                const TraceSink& sink, unsigned threads = 1,
                                const TraceHasher& hasher = TraceHasher{});

// Literal execution of the published SampleTraces pseudocode: child v' is
// entered when rand() > (1-p)^{count(v', i-1)} / (1 - (1-p)^{count(v, i)}),
// and the vertex's trace is output when no child was entered or with
// probability p. Kept for comparison; its per-trace inclusion
// probabilities are not exactly p.
SampleStats sample_traces_paper(const LabeledDag& dag, const PathCounts& counts,
                                const SamplingPlan& plan, std::uint64_t seed,
                                const TraceSink& sink, unsigned threads = 1,
                                const TraceHasher& hasher = TraceHasher{});

SampleStats sample_traces(const LabeledDag& dag, const PathCounts& counts,
                          const SamplingPlan& plan, std::uint64_t seed, const TraceSink& sink,
                          const SampleOptions& options = {});

}  // namespace tracelens
