#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tracelens/dag.hpp"

namespace tracelens {

// One cleaned observation of a tag. Raw readings have t_first == t_last;
// cleaning widens the range when several readings are merged.
struct EventRecord {
  double t_first = 0.0;  // minutes
  double t_last = 0.0;   // minutes
  std::string tag;
  Label zone = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct ParsedEvents {
  std::vector<EventRecord> records;  // sorted by (tag, time, zone)
  // Ids given to non-numeric zone names. They start above the largest
  // numeric zone so the two never collide.
  std::map<std::string, Label> zone_names;
};

// CSV rows `timestamp,tag,zone`. An optional header line `timestamp,tag,zone`
// and blank lines are skipped. Throws Error(malformed_row) naming the line.
ParsedEvents parse_events(std::istream& in);

struct LabelCollision {
  Label x = 0;
  Label y = 0;
  Label natural = 0;   // min*100 + max
  Label assigned = 0;  // remapped id actually used
  std::string reason;
};

// Hands out combined-zone labels min(x,y)*100 + max(x,y) for oscillating
// pairs, falling back to fresh ids when that value is ambiguous (x or y
// above 99) or already taken by a raw zone or another pair.
class OverlapLabeler {
public:
  explicit OverlapLabeler(std::set<Label> raw_zones = {});

  Label label_for(Label x, Label y);

  const std::vector<LabelCollision>& collisions() const { return collisions_; }
  const std::map<std::pair<Label, Label>, Label>& assigned() const { return assigned_; }

private:
  std::set<Label> used_;
  std::map<std::pair<Label, Label>, Label> assigned_;
  std::vector<LabelCollision> collisions_;
};

// Replaces every maximal run of readings of the form (x+y+)(x+y+)+ with one
// record labelled by the labeler and spanning the run's time range. Input
// must be one tag, time-sorted. Applied until nothing changes, so the
// result is a fixed point.
std::vector<EventRecord> collapse_oscillations(std::span<const EventRecord> events,
                                               OverlapLabeler& labeler);
std::vector<EventRecord> collapse_oscillations(std::span<const EventRecord> events);

// Collapses runs of consecutive equal zones into one record covering the
// run's time range.
std::vector<EventRecord> dedup_repeats(std::span<const EventRecord> events);

// Applies collapse_oscillations then dedup_repeats to every tag of a
// (tag, time)-sorted record list.
std::vector<EventRecord> clean_events(std::span<const EventRecord> events,
                                      OverlapLabeler& labeler);

// One vertex per record; edge (u,v) iff same tag, different zones and
// 0 < v.t_first - u.t_last <= delta. Vertices are ordered by (tag, t_first).
LabeledDag build_dag(std::span<const EventRecord> events, double delta);

struct IngestResult {
  LabeledDag dag;
  std::map<std::string, Label> zone_names;
  std::vector<LabelCollision> collisions;
};

IngestResult ingest_events(std::istream& in, double delta);

}  // namespace tracelens
