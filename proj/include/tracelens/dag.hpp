#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tracelens {

using Label = std::int64_t;
using VertexId = std::uint32_t;

// A label sequence read along a directed path.
using Trace = std::vector<Label>;

// Karp-Rabin style fingerprint of a trace.
struct TraceKey {
  std::uint64_t value = 0;

  friend bool operator==(TraceKey, TraceKey) = default;
  friend auto operator<=>(TraceKey, TraceKey) = default;
};

struct TraceKeyHash {
  std::size_t operator()(TraceKey key) const noexcept {
    return std::hash<std::uint64_t>{}(key.value);
  }
};

struct Vertex {
  Label label = 0;
  double t_first = 0.0;  // minutes
  double t_last = 0.0;   // minutes
  std::string tag;
};

struct Edge {
  VertexId source = 0;
  VertexId target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Vertex-labeled directed graph in compressed adjacency form. Immutable
// once constructed. Out-edges of every vertex are kept in canonical order
// (target t_first, then target index) so that seeded sampling is
// reproducible regardless of the order edges were supplied in.
//
// Construction does not reject cycles or duplicate edges; use validate_dag
// (or require_valid_dag) to check the DAG preconditions.
class LabeledDag {
public:
  LabeledDag() = default;
  LabeledDag(std::vector<Vertex> vertices, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size(); }

  const Vertex& vertex(VertexId v) const { return vertices_[v]; }
  Label label(VertexId v) const { return vertices_[v].label; }
  std::span<const Vertex> vertices() const noexcept { return vertices_; }

  std::span<const VertexId> out_edges(VertexId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  std::vector<Edge> edges() const;

private:
  std::vector<Vertex> vertices_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> targets_;
};

struct DagDiagnostics {
  std::vector<Edge> self_loops;
  std::vector<Edge> duplicate_edges;
  std::vector<VertexId> bad_time_ranges;  // vertices with t_first > t_last
  std::vector<VertexId> cycle;            // one cycle, in edge order; empty if acyclic

  bool ok() const {
    return self_loops.empty() && duplicate_edges.empty() && bad_time_ranges.empty() &&
           cycle.empty();
  }
  std::string describe() const;
};

DagDiagnostics validate_dag(const LabeledDag& dag);

// Throws Error(cycle_detected | duplicate_edge | invalid_dag) on the first
// problem found by validate_dag.
void require_valid_dag(const LabeledDag& dag);

// Kahn order; std::nullopt if the graph has a cycle.
std::optional<std::vector<VertexId>> topological_order(const LabeledDag& dag);

// Text format: `v <id> <label> <t_first> <t_last> <tag>` per vertex, then
// `e <src> <dst>` per edge. Vertex ids must be 0..n-1 in order. Blank lines
// and lines starting with '#' are ignored on input.
void write_dag(std::ostream& out, const LabeledDag& dag);
LabeledDag read_dag(std::istream& in);

std::string format_trace(std::span<const Label> labels);
Trace parse_trace(std::string_view text);

}  // namespace tracelens
