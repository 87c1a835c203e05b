#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/note.h"

namespace scorecf {

// Typed relations between nodes. The first four are derived from note onsets
// and durations; the last two connect notes to hierarchy nodes.
enum class EdgeType {
  kOnset,
  kConsecutive,
  kDuring,
  kRest,
  kNoteToBeat,
  kNoteToMeasure,
};

const char* edgeTypeName(EdgeType type);
std::optional<EdgeType> edgeTypeFromName(const std::string& name);

struct Edge {
  std::string src;
  std::string dst;
  EdgeType type;

  auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

// Beat or measure node covering the half-open span [start, start + length).
struct HierarchyNode {
  std::string id;
  Rational start;
  Rational length;

  bool operator==(const HierarchyNode&) const = default;
};

struct Hierarchy {
  Rational beat_length;
  Rational measure_length;
  std::vector<HierarchyNode> beats;
  std::vector<HierarchyNode> measures;
};

struct GraphMetadata {
  std::string piece_name;
  int num_classes = 2;
  std::string feature_layout;  // set on construction

  bool operator==(const GraphMetadata&) const = default;
};

// Heterogeneous directed graph over the notes of one piece. Immutable after
// construction; edits produce new graphs.
class ScoreGraph {
 public:
  ScoreGraph() = default;

  const std::vector<Note>& notes() const { return notes_; }
  const EdgeSet& edges() const { return edges_; }
  const std::optional<Hierarchy>& hierarchy() const { return hierarchy_; }
  const GraphMetadata& metadata() const { return meta_; }

  bool hasNote(const std::string& id) const;
  // Null when the id is unknown.
  const Note* findNote(const std::string& id) const;
  // Throws ValidationError when the id is unknown.
  const Note& note(const std::string& id) const;

  std::size_t activeNoteCount() const;  // non-removed notes
  bool hasHierarchyNode(const std::string& id) const;

  // Note ids in sorted order, optionally restricted to non-removed notes.
  std::vector<std::string> sortedNoteIds(bool active_only = true) const;

  // Assembles a graph from explicitly maintained parts without re-deriving
  // edges. Callers are responsible for rule consistency (edit maintenance,
  // deserialization); validateGraph checks it.
  static ScoreGraph fromParts(std::vector<Note> notes, EdgeSet edges,
                              std::optional<Hierarchy> hierarchy, GraphMetadata meta);

 private:
  std::vector<Note> notes_;
  std::map<std::string, std::size_t> index_;
  EdgeSet edges_;
  std::optional<Hierarchy> hierarchy_;
  GraphMetadata meta_;
};

// Derives the timing edges over all ordered pairs of non-removed notes:
//   onset u->v        iff on(u) = on(v)
//   consecutive u->v  iff on(u) + dur(u) = on(v)
//   during v->u       iff on(u) < on(v) < on(u) + dur(u)
//   rest u->v         iff on(u) + dur(u) < on(v) and no w starts strictly
//                     between the end of u and the onset of v
// All comparisons are exact. Throws ValidationError on duplicate ids or
// invalid notes.
ScoreGraph buildGraph(std::vector<Note> notes, GraphMetadata meta = {});

// Timing edges only (no hierarchy) for a note set; shared by buildGraph and
// the rebuild path.
EdgeSet deriveNoteEdges(const std::vector<Note>& notes);

// Hierarchy nodes and note->beat / note->measure edges for the given spans.
// One beat/measure node exists per span that covers at least one non-removed
// note onset.
std::pair<Hierarchy, EdgeSet> deriveHierarchy(const std::vector<Note>& notes,
                                              const Rational& beat_length,
                                              const Rational& measure_length);

// Returns a copy with beat/measure nodes attached. measure_length must be a
// positive multiple of beat_length.
ScoreGraph attachHierarchy(const ScoreGraph& graph, const Rational& beat_length,
                           const Rational& measure_length);

// Discards all edges and re-derives them from the current notes; hierarchy is
// re-attached when previously present. Reference re-derivation used as the
// oracle for incremental edit maintenance.
ScoreGraph rebuildEdges(const ScoreGraph& graph);

// Checks every structural invariant: edge set equals the rule derivation,
// onset/consecutive/during exclusivity per ordered pair, removed notes
// isolated, hierarchy consistency. Throws ValidationError on the first
// violation.
void validateGraph(const ScoreGraph& graph);

}  // namespace scorecf
