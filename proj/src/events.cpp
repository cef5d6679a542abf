#include "tracelens/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>

#include "tracelens/error.hpp"

namespace tracelens {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool time_order(const EventRecord& a, const EventRecord& b) {
  if (a.tag != b.tag) return a.tag < b.tag;
  if (a.t_first != b.t_first) return a.t_first < b.t_first;
  return a.zone < b.zone;
}

}  // namespace

ParsedEvents parse_events(std::istream& in) {
  struct Row {
    double time;
    std::string tag;
    std::string zone_name;  // empty when the zone is numeric
    Label zone;
  };
  std::vector<Row> rows;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    throw Error(ErrorCode::malformed_row, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line_no == 1 && line == "timestamp,tag,zone") continue;

    std::string_view fields[3];
    std::size_t count = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      if (count == 3) fail("expected 3 fields");
      fields[count++] = trim(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (count != 3) fail("expected 3 fields");

    Row row{};
    auto [end, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), row.time);
    if (ec != std::errc() || end != fields[0].data() + fields[0].size() || !std::isfinite(row.time)) {
      fail("timestamp '" + std::string(fields[0]) + "' is not a finite number");
    }
    if (fields[1].empty()) fail("empty tag");
    row.tag = std::string(fields[1]);
    if (fields[2].empty()) fail("empty zone");
    if (all_digits(fields[2])) {
      auto [zend, zec] =
          std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), row.zone);
      if (zec != std::errc()) fail("zone '" + std::string(fields[2]) + "' out of range");
    } else {
      row.zone_name = std::string(fields[2]);
    }
    rows.push_back(std::move(row));
  }

  ParsedEvents parsed;
  Label max_numeric = -1;
  for (const Row& r : rows) {
    if (r.zone_name.empty()) max_numeric = std::max(max_numeric, r.zone);
    else parsed.zone_names.emplace(r.zone_name, 0);
  }
  Label next = max_numeric + 1;
  for (auto& [name, id] : parsed.zone_names) id = next++;

  parsed.records.reserve(rows.size());
  for (Row& r : rows) {
    const Label zone = r.zone_name.empty() ? r.zone : parsed.zone_names.at(r.zone_name);
    parsed.records.push_back({r.time, r.time, std::move(r.tag), zone});
  }
  std::sort(parsed.records.begin(), parsed.records.end(), time_order);
  return parsed;
}

OverlapLabeler::OverlapLabeler(std::set<Label> raw_zones) : used_(std::move(raw_zones)) {}

Label OverlapLabeler::label_for(Label x, Label y) {
  const auto key = std::minmax(x, y);
  const std::pair<Label, Label> pair{key.first, key.second};
  if (auto it = assigned_.find(pair); it != assigned_.end()) return it->second;

  const Label natural = pair.first * 100 + pair.second;
  std::string reason;
  if (pair.first > 99 || pair.second > 99) {
    reason = "zone id above 99 makes min*100+max ambiguous";
  } else if (used_.count(natural)) {
    reason = "min*100+max equals an existing zone id";
  }
  Label label = natural;
  if (!reason.empty()) {
    label = std::max(natural, used_.empty() ? Label{0} : *used_.rbegin()) + 1;
    collisions_.push_back({pair.first, pair.second, natural, label, reason});
  }
  used_.insert(label);
  assigned_.emplace(pair, label);
  return label;
}

namespace {

struct Block {
  Label zone;
  std::size_t begin;
  std::size_t end;
};

std::vector<Block> zone_runs(std::span<const EventRecord> events) {
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (blocks.empty() || blocks.back().zone != events[i].zone) {
      blocks.push_back({events[i].zone, i, i + 1});
    } else {
      blocks.back().end = i + 1;
    }
  }
  return blocks;
}

EventRecord merge_range(std::span<const EventRecord> events, std::size_t begin, std::size_t end,
                        Label zone) {
  EventRecord merged = events[begin];
  merged.zone = zone;
  for (std::size_t i = begin; i < end; ++i) {
    merged.t_first = std::min(merged.t_first, events[i].t_first);
    merged.t_last = std::max(merged.t_last, events[i].t_last);
  }
  return merged;
}

std::vector<EventRecord> collapse_once(std::span<const EventRecord> events,
                                       OverlapLabeler& labeler) {
  const std::vector<Block> blocks = zone_runs(events);
  std::vector<EventRecord> out;
  out.reserve(events.size());
  std::size_t i = 0;
  while (i < blocks.size()) {
    std::size_t run = 1;
    if (i + 1 < blocks.size()) {
      const Label x = blocks[i].zone;
      const Label y = blocks[i + 1].zone;
      while (i + run < blocks.size() && blocks[i + run].zone == (run % 2 == 0 ? x : y)) ++run;
    }
    // (x+y+)(x+y+)+ needs at least two complete x-y block pairs and must
    // end on a y block.
    if (run >= 4) {
      const std::size_t take = run - run % 2;
      const Block& first = blocks[i];
      const Block& last = blocks[i + take - 1];
      out.push_back(merge_range(events, first.begin, last.end,
                                labeler.label_for(first.zone, blocks[i + 1].zone)));
      i += take;
    } else {
      for (std::size_t e = blocks[i].begin; e < blocks[i].end; ++e) out.push_back(events[e]);
      ++i;
    }
  }
  return out;
}

std::set<Label> zones_of(std::span<const EventRecord> events) {
  std::set<Label> zones;
  for (const EventRecord& e : events) zones.insert(e.zone);
  return zones;
}

}  // namespace

std::vector<EventRecord> collapse_oscillations(std::span<const EventRecord> events,
                                               OverlapLabeler& labeler) {
  std::vector<EventRecord> current(events.begin(), events.end());
  while (true) {
    std::vector<EventRecord> next = collapse_once(current, labeler);
    if (next.size() == current.size()) return next;
    current = std::move(next);
  }
}

std::vector<EventRecord> collapse_oscillations(std::span<const EventRecord> events) {
  OverlapLabeler labeler(zones_of(events));
  return collapse_oscillations(events, labeler);
}

std::vector<EventRecord> dedup_repeats(std::span<const EventRecord> events) {
  std::vector<EventRecord> out;
  for (const Block& b : zone_runs(events)) out.push_back(merge_range(events, b.begin, b.end, b.zone));
  return out;
}

std::vector<EventRecord> clean_events(std::span<const EventRecord> events,
                                      OverlapLabeler& labeler) {
  std::vector<EventRecord> out;
  out.reserve(events.size());
  std::size_t begin = 0;
  while (begin < events.size()) {
    std::size_t end = begin;
    while (end < events.size() && events[end].tag == events[begin].tag) ++end;
    const auto collapsed = collapse_oscillations(events.subspan(begin, end - begin), labeler);
    for (EventRecord& e : dedup_repeats(collapsed)) out.push_back(std::move(e));
    begin = end;
  }
  return out;
}

LabeledDag build_dag(std::span<const EventRecord> events, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::nonpositive_delta, "delta must be positive, got " + std::to_string(delta));
  }
  std::vector<EventRecord> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.tag != b.tag) return a.tag < b.tag;
    return a.t_first < b.t_first;
  });

  std::vector<Vertex> vertices;
  vertices.reserve(sorted.size());
  for (const EventRecord& e : sorted) vertices.push_back({e.zone, e.t_first, e.t_last, e.tag});

  // Scan forward within the tag; t_first is sorted, so once it passes
  // t_last + delta no later record can qualify.
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < sorted.size(); ++u) {
    const EventRecord& from = sorted[u];
    for (std::size_t v = u + 1; v < sorted.size(); ++v) {
      const EventRecord& to = sorted[v];
      if (to.tag != from.tag) break;
      const double gap = to.t_first - from.t_last;
      if (gap > delta) break;
      if (gap > 0.0 && to.zone != from.zone) {
        edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
      }
    }
  }
  return LabeledDag(std::move(vertices), std::move(edges));
}

IngestResult ingest_events(std::istream& in, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::nonpositive_delta, "delta must be positive, got " + std::to_string(delta));
  }
  ParsedEvents parsed = parse_events(in);
  OverlapLabeler labeler(zones_of(parsed.records));
  std::vector<EventRecord> cleaned = clean_events(parsed.records, labeler);
  return {build_dag(cleaned, delta), std::move(parsed.zone_names), labeler.collisions()};
}

}  // namespace tracelens
