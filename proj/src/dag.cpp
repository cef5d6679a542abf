#include "tracelens/dag.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "tracelens/error.hpp"

namespace tracelens {

LabeledDag::LabeledDag(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  for (const Edge& e : edges) {
    if (e.source >= n || e.target >= n) {
      throw Error(ErrorCode::invalid_dag, "edge (" + std::to_string(e.source) + "," +
                                              std::to_string(e.target) +
                                              ") references a missing vertex");
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [this](const Edge& a, const Edge& b) {
    if (a.source != b.source) return a.source < b.source;
    const double ta = vertices_[a.target].t_first;
    const double tb = vertices_[b.target].t_first;
    if (ta != tb) return ta < tb;
    return a.target < b.target;
  });
  offsets_.assign(n + 1, 0);
  targets_.reserve(edges.size());
  for (const Edge& e : edges) {
    ++offsets_[e.source + 1];
    targets_.push_back(e.target);
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
}

std::vector<Edge> LabeledDag::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count());
  for (VertexId v = 0; v < vertex_count(); ++v) {
    for (VertexId w : out_edges(v)) result.push_back({v, w});
  }
  return result;
}

std::optional<std::vector<VertexId>> topological_order(const LabeledDag& dag) {
  const std::size_t n = dag.vertex_count();
  std::vector<std::size_t> in_degree(n, 0);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId w : dag.out_edges(v)) ++in_degree[w];
  }
  std::vector<VertexId> order;
  order.reserve(n);
  for (VertexId v = 0; v < n; ++v) {
    if (in_degree[v] == 0) order.push_back(v);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (VertexId w : dag.out_edges(order[head])) {
      if (--in_degree[w] == 0) order.push_back(w);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

namespace {

// Every vertex left over by Kahn's algorithm has a leftover predecessor, so
// walking predecessors must eventually revisit a vertex.
std::vector<VertexId> find_cycle(const LabeledDag& dag) {
  const std::size_t n = dag.vertex_count();
  std::vector<std::size_t> in_degree(n, 0);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId w : dag.out_edges(v)) ++in_degree[w];
  }
  std::vector<VertexId> queue;
  for (VertexId v = 0; v < n; ++v) {
    if (in_degree[v] == 0) queue.push_back(v);
  }
  std::vector<bool> removed(n, false);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    removed[queue[head]] = true;
    for (VertexId w : dag.out_edges(queue[head])) {
      if (--in_degree[w] == 0) queue.push_back(w);
    }
  }
  std::vector<VertexId> predecessor(n, 0);
  std::optional<VertexId> start;
  for (VertexId v = 0; v < n; ++v) {
    if (removed[v]) continue;
    for (VertexId w : dag.out_edges(v)) {
      if (!removed[w]) predecessor[w] = v;
    }
    if (!start) start = v;
  }
  if (!start) return {};

  std::vector<std::size_t> seen_at(n, n);
  std::vector<VertexId> walk;
  VertexId v = *start;
  while (seen_at[v] == n) {
    seen_at[v] = walk.size();
    walk.push_back(v);
    v = predecessor[v];
  }
  std::vector<VertexId> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[v]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

DagDiagnostics validate_dag(const LabeledDag& dag) {
  DagDiagnostics report;
  for (VertexId v = 0; v < dag.vertex_count(); ++v) {
    const Vertex& vx = dag.vertex(v);
    if (!(vx.t_first <= vx.t_last)) report.bad_time_ranges.push_back(v);

    auto targets = dag.out_edges(v);
    std::vector<VertexId> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (sorted[j] == v && (j == 0 || sorted[j - 1] != v)) report.self_loops.push_back({v, v});
      if (j > 0 && sorted[j] == sorted[j - 1] && (j < 2 || sorted[j - 2] != sorted[j])) {
        report.duplicate_edges.push_back({v, sorted[j]});
      }
    }
  }
  if (!topological_order(dag)) report.cycle = find_cycle(dag);
  return report;
}

std::string DagDiagnostics::describe() const {
  std::ostringstream out;
  if (ok()) return "valid";
  if (!cycle.empty()) {
    out << "cycle:";
    for (VertexId v : cycle) out << ' ' << v;
    out << ' ' << cycle.front() << "; ";
  }
  for (const Edge& e : self_loops) out << "self-loop (" << e.source << ',' << e.target << "); ";
  for (const Edge& e : duplicate_edges) {
    out << "duplicate edge (" << e.source << ',' << e.target << "); ";
  }
  for (VertexId v : bad_time_ranges) out << "vertex " << v << " has t_first > t_last; ";
  std::string text = out.str();
  if (text.size() >= 2) text.resize(text.size() - 2);
  return text;
}

void require_valid_dag(const LabeledDag& dag) {
  DagDiagnostics report = validate_dag(dag);
  if (report.ok()) return;
  if (!report.cycle.empty() || !report.self_loops.empty()) {
    throw Error(ErrorCode::cycle_detected, report.describe());
  }
  if (!report.duplicate_edges.empty()) throw Error(ErrorCode::duplicate_edge, report.describe());
  throw Error(ErrorCode::invalid_dag, report.describe());
}

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && end == text.data() + text.size();
}

std::string_view next_field(std::string_view& line) {
  std::size_t start = line.find_first_not_of(" \t");
  if (start == std::string_view::npos) {
    line = {};
    return {};
  }
  line.remove_prefix(start);
  std::size_t stop = line.find_first_of(" \t");
  std::string_view field = line.substr(0, stop);
  line.remove_prefix(stop == std::string_view::npos ? line.size() : stop);
  return field;
}

}  // namespace

void write_dag(std::ostream& out, const LabeledDag& dag) {
  for (VertexId v = 0; v < dag.vertex_count(); ++v) {
    const Vertex& vx = dag.vertex(v);
    out << "v " << v << ' ' << vx.label << ' ' << format_double(vx.t_first) << ' '
        << format_double(vx.t_last) << ' ' << vx.tag << '\n';
  }
  for (VertexId v = 0; v < dag.vertex_count(); ++v) {
    for (VertexId w : dag.out_edges(v)) out << "e " << v << ' ' << w << '\n';
  }
}

LabeledDag read_dag(std::istream& in) {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    throw Error(ErrorCode::malformed_dag, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = raw;
    std::string_view kind = next_field(line);
    if (kind.empty() || kind.front() == '#') continue;
    if (kind == "v") {
      std::uint64_t id = 0;
      Vertex vx;
      if (!parse_number(next_field(line), id)) fail("bad vertex id");
      if (id != vertices.size()) fail("vertex ids must be consecutive from 0");
      if (!parse_number(next_field(line), vx.label)) fail("bad label");
      if (!parse_number(next_field(line), vx.t_first)) fail("bad t_first");
      if (!parse_number(next_field(line), vx.t_last)) fail("bad t_last");
      std::size_t start = line.find_first_not_of(" \t");
      vx.tag = start == std::string_view::npos ? std::string() : std::string(line.substr(start));
      vertices.push_back(std::move(vx));
    } else if (kind == "e") {
      Edge e;
      if (!parse_number(next_field(line), e.source)) fail("bad edge source");
      if (!parse_number(next_field(line), e.target)) fail("bad edge target");
      if (!next_field(line).empty()) fail("trailing fields after edge");
      edges.push_back(e);
    } else {
      fail("unknown record kind '" + std::string(kind) + "'");
    }
  }
  for (const Edge& e : edges) {
    if (e.source >= vertices.size() || e.target >= vertices.size()) {
      throw Error(ErrorCode::malformed_dag, "edge (" + std::to_string(e.source) + "," +
                                                std::to_string(e.target) +
                                                ") references a missing vertex");
    }
  }
  return LabeledDag(std::move(vertices), std::move(edges));
}

std::string format_trace(std::span<const Label> labels) {
  std::string text;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) text += '-';
    text += std::to_string(labels[i]);
  }
  return text;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  while (!text.empty()) {
    std::size_t dash = text.find('-');
    std::string_view field = text.substr(0, dash);
    Label label = 0;
    if (!parse_number(field, label)) {
      throw Error(ErrorCode::invalid_argument, "bad trace label '" + std::string(field) + "'");
    }
    trace.push_back(label);
    if (dash == std::string_view::npos) break;
    text.remove_prefix(dash + 1);
    if (text.empty()) throw Error(ErrorCode::invalid_argument, "trailing '-' in trace");
  }
  return trace;
}

}  // namespace tracelens
