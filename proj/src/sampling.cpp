#include "tracelens/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "tracelens/error.hpp"
#include "tracelens/random.hpp"

namespace tracelens {

double choose_p(double epsilon, double oversampling, bool clamp) {
  if (!(oversampling >= 1.0) || !std::isfinite(oversampling)) {
    throw Error(ErrorCode::invalid_argument, "C must be a finite number >= 1");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must be a positive finite number");
  }
  if (epsilon < oversampling) {
    if (clamp) return 1.0;
    throw Error(ErrorCode::threshold_too_small,
                "epsilon (" + std::to_string(epsilon) + ") is below C (" +
                    std::to_string(oversampling) + "), so p = C/epsilon would exceed 1");
  }
  return oversampling / epsilon;
}

std::vector<double> selection_table(std::span<const double> probabilities) {
  std::vector<double> log_q(probabilities.size() + 1, 0.0);
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    const double pj = probabilities[j];
    if (!(pj >= 0.0 && pj <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "child probability outside [0, 1]");
    }
    log_q[j + 1] = log_q[j] + std::log1p(-pj);
  }
  return log_q;
}

namespace {

double uniform_open(SamplerRng& rng) { return to_open_unit_interval(rng()); }
double uniform(SamplerRng& rng) { return to_unit_interval(rng()); }

// First j in (from, d] with log_q[j] < log_r, or d + 1 if there is none.
std::size_t next_call(std::span<const double> log_q, std::size_t from, double log_r) {
  auto it = std::partition_point(log_q.begin() + static_cast<std::ptrdiff_t>(from) + 1,
                                 log_q.end(), [log_r](double q) { return q >= log_r; });
  return static_cast<std::size_t>(it - log_q.begin());
}

void select_after(std::span<const double> log_q, std::size_t from, SamplerRng& rng,
                  std::vector<std::uint32_t>& out) {
  const std::size_t d = log_q.size() - 1;
  std::size_t j = from;
  while (j < d) {
    // r uniform in [0, q_j], in log space.
    const double log_r = log_q[j] + std::log(uniform_open(rng));
    j = next_call(log_q, j, log_r);
    if (j > d) break;
    out.push_back(static_cast<std::uint32_t>(j - 1));
  }
}

}  // namespace

void select_children(const ChildSelection& entry, SamplerRng& rng,
                     std::vector<std::uint32_t>& out) {
  const std::size_t d = entry.child_count();
  if (entry.certain) {
    for (std::uint32_t j = 0; j < d; ++j) out.push_back(j);
    return;
  }
  if (d == 0) return;
  select_after(entry.log_q, 0, rng, out);
}

bool select_children_conditioned(const ChildSelection& entry, double log_none, SamplerRng& rng,
                                 std::vector<std::uint32_t>& out) {
  const std::size_t d = entry.child_count();
  if (entry.certain) {
    for (std::uint32_t j = 0; j < d; ++j) out.push_back(j);
    return d == 0;
  }
  if (d == 0) return true;
  // r uniform in [q_none, 1]: the event "something is sampled" has
  // probability 1 - q_none.
  const double some = -std::expm1(log_none);
  const double log_r = std::log1p(-uniform_open(rng) * some);
  const std::size_t first = next_call(entry.log_q, 0, log_r);
  if (first > d) return true;
  out.push_back(static_cast<std::uint32_t>(first - 1));
  select_after(entry.log_q, first, rng, out);
  return false;
}

double SamplingPlan::keep_none(std::uint64_t count) const {
  if (count == 0) return 1.0;
  return std::exp(static_cast<double>(count) * log1mp_);
}

ChildSelection SamplingPlan::children(VertexId v, unsigned i) const {
  const std::size_t start = static_cast<std::size_t>(i - 1) * stride_ + row_start_[v];
  const std::size_t size = row_start_[v + 1] - row_start_[v];
  return {std::span<const double>(log_q_.data() + start, size), certain()};
}

SamplingPlan prepare_plan(const LabeledDag& dag, const PathCounts& counts, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "sampling probability must lie in (0, 1]");
  }
  if (counts.vertex_count() != dag.vertex_count() || counts.max_length() < 1) {
    throw Error(ErrorCode::invalid_argument, "path counts do not match the DAG");
  }
  SamplingPlan plan;
  const std::size_t n = dag.vertex_count();
  const unsigned m = counts.max_length();
  plan.p_ = p;
  plan.log1mp_ = p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
  plan.max_length_ = m;
  plan.vertex_count_ = n;
  plan.stride_ = dag.edge_count() + n;
  plan.row_start_.assign(n + 1, 0);
  for (VertexId v = 0; v < n; ++v) {
    plan.row_start_[v + 1] = plan.row_start_[v] + dag.out_edges(v).size() + 1;
  }

  auto log_keep = [&plan](double count) { return count == 0.0 ? 0.0 : count * plan.log1mp_; };

  plan.log_q_.assign(static_cast<std::size_t>(m) * plan.stride_, 0.0);
  plan.log_none_.assign((static_cast<std::size_t>(m) + 1) * n, 0.0);
  for (unsigned i = 1; i <= m; ++i) {
    for (VertexId v = 0; v < n; ++v) {
      double* row = plan.log_q_.data() + static_cast<std::size_t>(i - 1) * plan.stride_ +
                    plan.row_start_[v];
      double prefix = 0.0;
      row[0] = 0.0;
      auto out = dag.out_edges(v);
      for (std::size_t j = 0; j < out.size(); ++j) {
        prefix += static_cast<double>(counts.count(out[j], i - 1));
        row[j + 1] = log_keep(prefix);
      }
      plan.log_none_[static_cast<std::size_t>(i) * n + v] =
          log_keep(static_cast<double>(counts.count(v, i)));
    }
  }
  return plan;
}

namespace {

struct EmissionBuffer {
  std::vector<Label> labels;
  std::vector<std::uint32_t> lengths;
  std::vector<TraceKey> keys;

  void push(std::span<const Label> trace, TraceKey key) {
    labels.insert(labels.end(), trace.begin(), trace.end());
    lengths.push_back(static_cast<std::uint32_t>(trace.size()));
    keys.push_back(key);
  }

  void replay(const TraceSink& sink) const {
    std::size_t offset = 0;
    for (std::size_t t = 0; t < lengths.size(); ++t) {
      sink(std::span<const Label>(labels.data() + offset, lengths[t]), keys[t]);
      offset += lengths[t];
    }
  }
};

// Shared traversal state for one start vertex.
struct Walk {
  const LabeledDag& dag;
  const TraceHasher& hasher;
  std::vector<Label> labels;
  std::vector<TraceKey> keys;
  SampleStats stats;

  void push(VertexId v) {
    keys.push_back(hasher.extend(keys.empty() ? TraceKey{} : keys.back(), dag.label(v)));
    labels.push_back(dag.label(v));
  }
  void pop() {
    labels.pop_back();
    keys.pop_back();
  }
  template <class Emit>
  void emit(Emit& sink) {
    sink(std::span<const Label>(labels), keys.back());
    ++stats.emitted;
    stats.emitted_labels += labels.size();
  }
};

template <class Emit>
void exact_from_vertex(const LabeledDag& dag, const SamplingPlan& plan, VertexId start,
                       SamplerRng& rng, Walk& walk, Emit& sink) {
  struct Frame {
    VertexId vertex;
    unsigned budget;
    std::size_t begin;  // this frame's slice of `chosen`
    std::size_t next;
    std::size_t end;
  };
  std::vector<Frame> stack;
  std::vector<std::uint32_t> chosen;

  // Every frame is entered conditioned on at least one of its traces being
  // sampled.
  auto enter = [&](VertexId v, unsigned budget) {
    walk.push(v);
    const std::size_t begin = chosen.size();
    bool forced = true;
    if (budget >= 2) {
      forced = select_children_conditioned(plan.children(v, budget),
                                           plan.log_no_sample(v, budget), rng, chosen);
    }
    if (forced || plan.certain() || uniform(rng) < plan.p()) walk.emit(sink);
    stack.push_back({v, budget, begin, begin, chosen.size()});
  };

  enter(start, plan.max_length());
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < top.end) {
      const VertexId child = dag.out_edges(top.vertex)[chosen[top.next++]];
      enter(child, top.budget - 1);
    } else {
      chosen.resize(top.begin);
      stack.pop_back();
      walk.pop();
    }
  }
}

template <class Emit>
void paper_from_vertex(const LabeledDag& dag, const PathCounts& counts, const SamplingPlan& plan,
                       VertexId start, SamplerRng& rng, Walk& walk, Emit& sink) {
  struct Frame {
    VertexId vertex;
    unsigned budget;
    std::size_t next_child;
    bool out;
  };
  std::vector<Frame> stack;
  auto enter = [&](VertexId v, unsigned budget) {
    walk.push(v);
    stack.push_back({v, budget, 0, false});
  };

  enter(start, plan.max_length());
  while (!stack.empty()) {
    Frame& top = stack.back();
    auto out = dag.out_edges(top.vertex);
    // With budget 1 every child count is 0 and the threshold is >= 1, so
    // no child can pass; skip the loop.
    if (top.budget >= 2 && top.next_child < out.size()) {
      const VertexId child = out[top.next_child++];
      const double threshold = plan.keep_none(counts.count(child, top.budget - 1)) /
                               (1.0 - plan.keep_none(counts.count(top.vertex, top.budget)));
      if (uniform_open(rng) > threshold) {
        top.out = true;
        enter(child, top.budget - 1);
      }
      continue;
    }
    if (!top.out || uniform(rng) < plan.p()) walk.emit(sink);
    stack.pop_back();
    walk.pop();
  }
}

template <class FromVertex>
SampleStats run_sampler(const LabeledDag& dag, const PathCounts& counts, const SamplingPlan& plan,
                        std::uint64_t seed, const TraceSink& sink, unsigned threads,
                        const TraceHasher& hasher, FromVertex from_vertex) {
  if (counts.vertex_count() != dag.vertex_count() ||
      counts.max_length() != plan.max_length()) {
    throw Error(ErrorCode::invalid_argument, "plan, counts and DAG do not match");
  }
  const std::size_t n = dag.vertex_count();
  const unsigned m = plan.max_length();

  auto run_range = [&](std::size_t begin, std::size_t end, auto& emit) {
    Walk walk{dag, hasher, {}, {}, {}};
    for (std::size_t v = begin; v < end; ++v) {
      const std::uint64_t vertex_seed = derive_seed(seed, v);
      // Line-13 test: enter v iff something in S_m(v) is sampled.
      const double some = -std::expm1(plan.log_no_sample(static_cast<VertexId>(v), m));
      if (!(to_unit_interval(vertex_seed) < some)) continue;
      ++walk.stats.top_level_calls;
      SamplerRng rng(mix64(vertex_seed));
      from_vertex(static_cast<VertexId>(v), rng, walk, emit);
    }
    return walk.stats;
  };

  auto merge = [](SampleStats& into, const SampleStats& from) {
    into.emitted += from.emitted;
    into.emitted_labels += from.emitted_labels;
    into.top_level_calls += from.top_level_calls;
  };

  SampleStats total;
  if (threads <= 1 || n < 2) {
    auto emit = [&sink](std::span<const Label> labels, TraceKey key) { sink(labels, key); };
    merge(total, run_range(0, n, emit));
    return total;
  }

  const std::size_t chunk_count = std::min<std::size_t>(n, static_cast<std::size_t>(threads) * 8);
  std::vector<EmissionBuffer> buffers(chunk_count);
  std::vector<SampleStats> stats(chunk_count);
  std::atomic<std::size_t> next_chunk{0};
  auto worker = [&] {
    for (std::size_t c = next_chunk++; c < chunk_count; c = next_chunk++) {
      const std::size_t begin = n * c / chunk_count;
      const std::size_t end = n * (c + 1) / chunk_count;
      auto emit = [&buffer = buffers[c]](std::span<const Label> labels, TraceKey key) {
        buffer.push(labels, key);
      };
      stats[c] = run_range(begin, end, emit);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::size_t c = 0; c < chunk_count; ++c) {
    buffers[c].replay(sink);
    merge(total, stats[c]);
  }
  return total;
}

}  // namespace

SampleStats sample_traces_exact(const LabeledDag& dag, const PathCounts& counts,
                                const SamplingPlan& plan, std::uint64_t seed,
                                const TraceSink& sink, unsigned threads,
                                const TraceHasher& hasher) {
  return run_sampler(dag, counts, plan, seed, sink, threads, hasher,
                     [&](VertexId v, SamplerRng& rng, Walk& walk, auto& emit) {
                       exact_from_vertex(dag, plan, v, rng, walk, emit);
                     });
}

SampleStats sample_traces_paper(const LabeledDag& dag, const PathCounts& counts,
                                const SamplingPlan& plan, std::uint64_t seed,
                                const TraceSink& sink, unsigned threads,
                                const TraceHasher& hasher) {
  return run_sampler(dag, counts, plan, seed, sink, threads, hasher,
                     [&](VertexId v, SamplerRng& rng, Walk& walk, auto& emit) {
                       paper_from_vertex(dag, counts, plan, v, rng, walk, emit);
                     });
}

SampleStats sample_traces(const LabeledDag& dag, const PathCounts& counts,
                          const SamplingPlan& plan, std::uint64_t seed, const TraceSink& sink,
                          const SampleOptions& options) {
  if (options.kind == SamplerKind::paper) {
    return sample_traces_paper(dag, counts, plan, seed, sink, options.threads, options.hasher);
  }
  return sample_traces_exact(dag, counts, plan, seed, sink, options.threads, options.hasher);
}

}  // namespace tracelens
