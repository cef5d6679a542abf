#include "tracelens/enumeration.hpp"

#include <vector>

#include "tracelens/error.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/random.hpp"

namespace tracelens {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  // Reduction modulo 2^61 - 1 without division.
  std::uint64_t folded = static_cast<std::uint64_t>(product & TraceHasher::modulus) +
                         static_cast<std::uint64_t>(product >> 61);
  while (folded >= TraceHasher::modulus) folded -= TraceHasher::modulus;
  return folded;
}

void check_limit(const LabeledDag& dag, unsigned max_length, std::uint64_t limit) {
  const std::uint64_t predicted = total_traces(count_traces(dag, max_length));
  if (predicted > limit) {
    throw Error(ErrorCode::too_many_traces,
                std::to_string(predicted) + " traces exceed the enumeration limit of " +
                    std::to_string(limit));
  }
}

}  // namespace

TraceHasher::TraceHasher(std::uint64_t seed) : base_(mix64(seed) % (modulus - 3) + 2) {}

TraceKey TraceHasher::extend(TraceKey prefix, Label next) const noexcept {
  const std::uint64_t code = (static_cast<std::uint64_t>(next) + 1) % modulus;
  std::uint64_t value = mul_mod(prefix.value, base_) + code;
  if (value >= modulus) value -= modulus;
  return TraceKey{value};
}

TraceKey TraceHasher::key_of(std::span<const Label> labels) const noexcept {
  TraceKey key{};
  for (Label label : labels) key = extend(key, label);
  return key;
}

std::uint64_t all_traces(const LabeledDag& dag, unsigned max_length, const TraceHasher& hasher,
                         const TraceSink& sink) {
  if (max_length < 1) throw Error(ErrorCode::invalid_argument, "m must be at least 1");
  struct Frame {
    VertexId vertex;
    std::size_t next_edge;
  };
  std::vector<Frame> stack;
  std::vector<Label> labels;
  std::vector<TraceKey> keys;
  std::uint64_t emitted = 0;

  auto enter = [&](VertexId v) {
    const TraceKey key = hasher.extend(keys.empty() ? TraceKey{} : keys.back(), dag.label(v));
    stack.push_back({v, 0});
    labels.push_back(dag.label(v));
    keys.push_back(key);
    sink(labels, key);
    ++emitted;
  };

  for (VertexId start = 0; start < dag.vertex_count(); ++start) {
    enter(start);
    while (!stack.empty()) {
      Frame& top = stack.back();
      auto out = dag.out_edges(top.vertex);
      if (stack.size() < max_length && top.next_edge < out.size()) {
        enter(out[top.next_edge++]);
      } else {
        stack.pop_back();
        labels.pop_back();
        keys.pop_back();
      }
    }
  }
  return emitted;
}

std::map<Trace, std::uint64_t> exact_frequencies(const LabeledDag& dag, unsigned max_length,
                                                 std::uint64_t limit) {
  check_limit(dag, max_length, limit);
  std::map<Trace, std::uint64_t> frequencies;
  all_traces(dag, max_length, TraceHasher{}, [&](std::span<const Label> labels, TraceKey) {
    ++frequencies[Trace(labels.begin(), labels.end())];
  });
  return frequencies;
}

std::unordered_map<TraceKey, std::uint64_t, TraceKeyHash> exact_key_frequencies(
    const LabeledDag& dag, unsigned max_length, const TraceHasher& hasher, std::uint64_t limit) {
  check_limit(dag, max_length, limit);
  std::unordered_map<TraceKey, std::uint64_t, TraceKeyHash> frequencies;
  all_traces(dag, max_length, hasher,
             [&](std::span<const Label>, TraceKey key) { ++frequencies[key]; });
  return frequencies;
}

}  // namespace tracelens
