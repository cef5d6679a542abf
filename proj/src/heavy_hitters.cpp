#include "tracelens/heavy_hitters.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

#include "tracelens/error.hpp"
#include "tracelens/random.hpp"

namespace tracelens {

CounterTable::CounterTable(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::invalid_argument, "counter capacity must be >= 1");
  entries_.reserve(capacity);
}

void CounterTable::update(TraceKey key, std::span<const Label> labels) {
  ++consumed_;
  if (auto it = entries_.find(key); it != entries_.end()) {
    ++it->second.count;
    return;
  }
  if (entries_.size() < capacity_) {
    entries_.emplace(key, Entry{1, Trace(labels.begin(), labels.end())});
    peak_size_ = std::max(peak_size_, entries_.size());
    return;
  }
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (--it->second.count == 0) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  assert(entries_.size() <= capacity_);
}

std::vector<Candidate> CounterTable::candidates() const {
  std::vector<Candidate> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.push_back({key, entry.labels, entry.count});
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  return out;
}

std::uint64_t fresh_pass_seed(std::uint64_t seed) { return derive_seed(seed, 0x5ec0'0d'7a55ULL); }

std::map<TraceKey, std::uint64_t> exact_second_pass(std::span<const Candidate> candidates,
                                                    const LabeledDag& dag,
                                                    const PathCounts& counts,
                                                    const SamplingPlan& plan,
                                                    std::optional<std::uint64_t> seed,
                                                    const MineOptions& options,
                                                    std::uint64_t* stream_length) {
  std::uint64_t pass_seed = 0;
  if (options.mode == SecondPassMode::regenerate) {
    if (!seed) {
      throw Error(ErrorCode::mode_mismatch,
                  "regenerate mode needs the first-pass seed to replay the sample");
    }
    pass_seed = *seed;
  } else {
    pass_seed = seed ? fresh_pass_seed(*seed) : std::random_device{}();
  }

  std::map<TraceKey, std::uint64_t> exact;
  if (candidates.empty()) {
    if (stream_length) *stream_length = 0;
    return exact;
  }
  std::unordered_map<TraceKey, std::uint64_t, TraceKeyHash> tally;
  for (const Candidate& c : candidates) tally.emplace(c.key, 0);

  SampleOptions sample_options{options.sampler, options.threads, options.hasher};
  const SampleStats stats = sample_traces(
      dag, counts, plan, pass_seed,
      [&tally](std::span<const Label>, TraceKey key) {
        if (auto it = tally.find(key); it != tally.end()) ++it->second;
      },
      sample_options);
  if (stream_length) *stream_length = stats.emitted;
  exact.insert(tally.begin(), tally.end());
  return exact;
}

namespace {

bool by_frequency(const FrequentTrace& a, const FrequentTrace& b) {
  if (a.sample_count != b.sample_count) return a.sample_count > b.sample_count;
  return a.labels < b.labels;
}

}  // namespace

MiningReport mine_frequent(const LabeledDag& dag, const PathCounts& counts, double epsilon,
                           double oversampling, std::uint64_t seed, const MineOptions& options) {
  MiningReport report;
  report.vertex_count = dag.vertex_count();
  report.edge_count = dag.edge_count();
  report.max_length = counts.max_length();
  report.total_traces = total_traces(counts);
  report.epsilon = epsilon;
  report.oversampling = oversampling;
  report.p = choose_p(epsilon, oversampling);
  const double expected_stream =
      report.p * static_cast<double>(report.total_traces);
  report.capacity = static_cast<std::size_t>(
      std::max(1.0, std::ceil(2.0 * expected_stream / oversampling)));
  report.report_threshold = static_cast<std::uint64_t>(std::floor(oversampling / 2.0));

  const SamplingPlan plan = prepare_plan(dag, counts, report.p);
  CounterTable table(report.capacity);
  SampleOptions sample_options{options.sampler, options.threads, options.hasher};
  const SampleStats first = sample_traces(
      dag, counts, plan, seed,
      [&table](std::span<const Label> labels, TraceKey key) { table.update(key, labels); },
      sample_options);
  report.first_pass_samples = first.emitted;
  report.peak_table_size = table.peak_size();

  const std::vector<Candidate> candidates = table.candidates();
  report.candidate_count = candidates.size();
  const auto exact = exact_second_pass(candidates, dag, counts, plan, seed, options,
                                       &report.second_pass_samples);
  for (const Candidate& c : candidates) {
    const std::uint64_t count = exact.at(c.key);
    if (count > report.report_threshold) {
      report.reported.push_back(
          {c.labels, c.key, count, static_cast<double>(count) / report.p});
    }
  }
  std::sort(report.reported.begin(), report.reported.end(), by_frequency);
  return report;
}

MiningReport mine_frequent(const LabeledDag& dag, unsigned max_length, double epsilon,
                           double oversampling, std::uint64_t seed, const MineOptions& options) {
  return mine_frequent(dag, count_traces(dag, max_length), epsilon, oversampling, seed, options);
}

TopKReport top_k(const LabeledDag& dag, unsigned max_length, std::size_t k, double oversampling,
                 std::uint64_t seed, const MineOptions& options) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  const PathCounts counts = count_traces(dag, max_length);
  const double total = static_cast<double>(total_traces(counts));
  if (total < oversampling) {
    throw Error(ErrorCode::budget_exceeded,
                "|S_m| = " + std::to_string(total) + " is below C; no threshold is feasible");
  }
  TopKReport result;
  double epsilon = std::max(total / 2.0, oversampling);
  while (true) {
    ++result.rounds;
    result.last = mine_frequent(dag, counts, epsilon, oversampling, seed, options);
    if (result.last.reported.size() >= k) break;
    if (epsilon <= oversampling) {
      throw Error(ErrorCode::budget_exceeded,
                  "only " + std::to_string(result.last.reported.size()) +
                      " traces reported at the smallest threshold epsilon = C");
    }
    epsilon = std::max(epsilon / 2.0, oversampling);
  }
  result.traces = result.last.reported;
  std::stable_sort(result.traces.begin(), result.traces.end(),
                   [](const FrequentTrace& a, const FrequentTrace& b) {
                     if (a.estimated_frequency != b.estimated_frequency) {
                       return a.estimated_frequency > b.estimated_frequency;
                     }
                     return a.labels < b.labels;
                   });
  result.traces.resize(k);
  return result;
}

}  // namespace tracelens
