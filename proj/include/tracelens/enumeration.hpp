#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>

#include "tracelens/dag.hpp"

namespace tracelens {

// Incremental Karp-Rabin fingerprint over the Mersenne prime 2^61 - 1.
// The base is drawn from the seed; extending a key by one label is O(1).
class TraceHasher {
public:
  static constexpr std::uint64_t modulus = (std::uint64_t{1} << 61) - 1;
  static constexpr std::uint64_t default_seed = 0x7472616365ULL;

  explicit TraceHasher(std::uint64_t seed = default_seed);

  std::uint64_t base() const noexcept { return base_; }

  // ((prefix * base) + code(label)) mod q, with code(label) = label + 1 so
  // that no label hashes like the empty trace.
  TraceKey extend(TraceKey prefix, Label next) const noexcept;
  TraceKey key_of(std::span<const Label> labels) const noexcept;

private:
  std::uint64_t base_;
};

using TraceSink = std::function<void(std::span<const Label> labels, TraceKey key)>;

// Emits the trace of every path with 1..m vertices, once per path, in
// depth-first order from each start vertex in index order. Returns the
// number of traces emitted (= total_traces). Uses an explicit stack, so
// depth is bounded only by m.
std::uint64_t all_traces(const LabeledDag& dag, unsigned max_length, const TraceHasher& hasher,
                         const TraceSink& sink);

inline constexpr std::uint64_t default_enumeration_limit = 50'000'000;

// Exact multiplicity of every distinct trace of S_m. Throws
// Error(too_many_traces) when |S_m| exceeds `limit`.
std::map<Trace, std::uint64_t> exact_frequencies(
    const LabeledDag& dag, unsigned max_length,
    std::uint64_t limit = default_enumeration_limit);

std::unordered_map<TraceKey, std::uint64_t, TraceKeyHash> exact_key_frequencies(
    const LabeledDag& dag, unsigned max_length, const TraceHasher& hasher,
    std::uint64_t limit = default_enumeration_limit);

}  // namespace tracelens
