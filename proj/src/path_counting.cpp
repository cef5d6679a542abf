#include "tracelens/path_counting.hpp"

#include "tracelens/error.hpp"

namespace tracelens {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, VertexId v, unsigned i) {
  std::uint64_t sum = 0;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw Error(ErrorCode::count_overflow, "trace count at vertex " + std::to_string(v) +
                                               ", length " + std::to_string(i) +
                                               " exceeds 64 bits");
  }
  return sum;
}

}  // namespace

PathCounts::PathCounts(std::size_t vertex_count, unsigned max_length)
    : vertex_count_(vertex_count),
      max_length_(max_length),
      table_((static_cast<std::size_t>(max_length) + 1) * vertex_count, 0) {}

PathCounts count_traces(const LabeledDag& dag, unsigned max_length) {
  if (max_length < 1) throw Error(ErrorCode::invalid_argument, "m must be at least 1");
  require_valid_dag(dag);

  // Layer i only reads layer i-1, so evaluating by increasing i gives the
  // memoized recursion's values without any recursion.
  PathCounts counts(dag.vertex_count(), max_length);
  for (unsigned i = 1; i <= max_length; ++i) {
    for (VertexId v = 0; v < dag.vertex_count(); ++v) {
      std::uint64_t c = 1;
      for (VertexId w : dag.out_edges(v)) c = checked_add(c, counts.count(w, i - 1), v, i);
      counts.count(v, i) = c;
    }
  }
  return counts;
}

std::uint64_t total_traces(const PathCounts& counts) {
  std::uint64_t total = 0;
  const unsigned m = counts.max_length();
  for (VertexId v = 0; v < counts.vertex_count(); ++v) {
    if (__builtin_add_overflow(total, counts.count(v, m), &total)) {
      throw Error(ErrorCode::count_overflow, "total trace count exceeds 64 bits");
    }
  }
  return total;
}

}  // namespace tracelens
