#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tracelens/dag.hpp"

namespace tracelens {

// count(v, i) = number of paths with at most i vertices starting at v.
// count(v, 0) = 0 and count(v, i) = 1 + sum over out-edges (v,w) of
// count(w, i-1).
class PathCounts {
public:
  PathCounts() = default;
  PathCounts(std::size_t vertex_count, unsigned max_length);

  unsigned max_length() const noexcept { return max_length_; }
  std::size_t vertex_count() const noexcept { return vertex_count_; }

  std::uint64_t count(VertexId v, unsigned i) const { return table_[index(v, i)]; }
  std::uint64_t& count(VertexId v, unsigned i) { return table_[index(v, i)]; }

private:
  std::size_t index(VertexId v, unsigned i) const {
    return static_cast<std::size_t>(i) * vertex_count_ + v;
  }

  std::size_t vertex_count_ = 0;
  unsigned max_length_ = 0;
  std::vector<std::uint64_t> table_;  // layer-major: all vertices for i, then i+1
};

// O(|E| m) time, O(|V| m) space. Throws Error(cycle_detected) on a cyclic
// graph and Error(count_overflow) if any count exceeds 64 bits.
PathCounts count_traces(const LabeledDag& dag, unsigned max_length);

// |S_m| = sum over v of count(v, m); overflow-checked.
std::uint64_t total_traces(const PathCounts& counts);

}  // namespace tracelens
