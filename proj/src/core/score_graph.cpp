#include "core/score_graph.h"

#include <algorithm>

#include "core/errors.h"
#include "core/features.h"

namespace scorecf {

const char* edgeTypeName(EdgeType type) {
  switch (type) {
    case EdgeType::kOnset: return "onset";
    case EdgeType::kConsecutive: return "consecutive";
    case EdgeType::kDuring: return "during";
    case EdgeType::kRest: return "rest";
    case EdgeType::kNoteToBeat: return "note_to_beat";
    case EdgeType::kNoteToMeasure: return "note_to_measure";
  }
  return "unknown";
}

std::optional<EdgeType> edgeTypeFromName(const std::string& name) {
  for (EdgeType t : {EdgeType::kOnset, EdgeType::kConsecutive, EdgeType::kDuring, EdgeType::kRest,
                     EdgeType::kNoteToBeat, EdgeType::kNoteToMeasure}) {
    if (name == edgeTypeName(t)) return t;
  }
  return std::nullopt;
}

bool ScoreGraph::hasNote(const std::string& id) const { return index_.contains(id); }

const Note* ScoreGraph::findNote(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &notes_[it->second];
}

const Note& ScoreGraph::note(const std::string& id) const {
  const Note* n = findNote(id);
  if (!n) throw ValidationError("unknown note id '" + id + "'");
  return *n;
}

std::size_t ScoreGraph::activeNoteCount() const {
  return static_cast<std::size_t>(
      std::count_if(notes_.begin(), notes_.end(), [](const Note& n) { return !n.removed; }));
}

bool ScoreGraph::hasHierarchyNode(const std::string& id) const {
  if (!hierarchy_) return false;
  const auto match = [&](const HierarchyNode& h) { return h.id == id; };
  return std::any_of(hierarchy_->beats.begin(), hierarchy_->beats.end(), match) ||
         std::any_of(hierarchy_->measures.begin(), hierarchy_->measures.end(), match);
}

std::vector<std::string> ScoreGraph::sortedNoteIds(bool active_only) const {
  std::vector<std::string> ids;
  ids.reserve(notes_.size());
  for (const Note& n : notes_) {
    if (active_only && n.removed) continue;
    ids.push_back(n.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ScoreGraph ScoreGraph::fromParts(std::vector<Note> notes, EdgeSet edges,
                                 std::optional<Hierarchy> hierarchy, GraphMetadata meta) {
  ScoreGraph g;
  g.notes_ = std::move(notes);
  for (std::size_t i = 0; i < g.notes_.size(); ++i) {
    if (!g.index_.emplace(g.notes_[i].id, i).second) {
      throw ValidationError("duplicate note id '" + g.notes_[i].id + "'");
    }
  }
  g.edges_ = std::move(edges);
  g.hierarchy_ = std::move(hierarchy);
  if (meta.feature_layout.empty()) meta.feature_layout = featureLayoutId();
  g.meta_ = std::move(meta);
  return g;
}

EdgeSet deriveNoteEdges(const std::vector<Note>& notes) {
  EdgeSet edges;
  std::vector<const Note*> active;
  active.reserve(notes.size());
  for (const Note& n : notes) {
    if (!n.removed) active.push_back(&n);
  }
  for (const Note* u : active) {
    for (const Note* v : active) {
      if (u == v) continue;
      if (u->onset == v->onset) {
        edges.insert({u->id, v->id, EdgeType::kOnset});
      } else if (u->end() == v->onset) {
        edges.insert({u->id, v->id, EdgeType::kConsecutive});
      }
      if (u->onset < v->onset && u->end() > v->onset) {
        edges.insert({v->id, u->id, EdgeType::kDuring});
      }
      if (u->end() < v->onset) {
        bool blocked = false;
        for (const Note* w : active) {
          if (w->onset < v->onset && u->end() < w->onset) {
            blocked = true;
            break;
          }
        }
        if (!blocked) edges.insert({u->id, v->id, EdgeType::kRest});
      }
    }
  }
  return edges;
}

ScoreGraph buildGraph(std::vector<Note> notes, GraphMetadata meta) {
  for (const Note& n : notes) validateNote(n);
  EdgeSet edges = deriveNoteEdges(notes);
  return ScoreGraph::fromParts(std::move(notes), std::move(edges), std::nullopt, std::move(meta));
}

std::pair<Hierarchy, EdgeSet> deriveHierarchy(const std::vector<Note>& notes,
                                              const Rational& beat_length,
                                              const Rational& measure_length) {
  Hierarchy h;
  h.beat_length = beat_length;
  h.measure_length = measure_length;
  EdgeSet edges;
  std::set<std::int64_t> beat_idx;
  std::set<std::int64_t> measure_idx;
  for (const Note& n : notes) {
    if (n.removed) continue;
    const std::int64_t b = floorDiv(n.onset, beat_length);
    const std::int64_t m = floorDiv(n.onset, measure_length);
    beat_idx.insert(b);
    measure_idx.insert(m);
    edges.insert({n.id, "beat:" + std::to_string(b), EdgeType::kNoteToBeat});
    edges.insert({n.id, "measure:" + std::to_string(m), EdgeType::kNoteToMeasure});
  }
  for (const std::int64_t b : beat_idx) {
    h.beats.push_back({"beat:" + std::to_string(b), Rational(b) * beat_length, beat_length});
  }
  for (const std::int64_t m : measure_idx) {
    h.measures.push_back(
        {"measure:" + std::to_string(m), Rational(m) * measure_length, measure_length});
  }
  return {std::move(h), std::move(edges)};
}

ScoreGraph attachHierarchy(const ScoreGraph& graph, const Rational& beat_length,
                           const Rational& measure_length) {
  if (beat_length <= Rational(0) || measure_length <= Rational(0)) {
    throw ValidationError("hierarchy spans must be positive");
  }
  if ((measure_length / beat_length).denominator() != 1) {
    throw ValidationError("measure length must be a multiple of the beat length");
  }
  for (const Note& n : graph.notes()) {
    if (n.id.starts_with("beat:") || n.id.starts_with("measure:")) {
      throw ValidationError("note id '" + n.id + "' collides with the hierarchy id namespace");
    }
  }
  auto [hier, hier_edges] = deriveHierarchy(graph.notes(), beat_length, measure_length);
  EdgeSet edges = graph.edges();
  edges.insert(hier_edges.begin(), hier_edges.end());
  return ScoreGraph::fromParts(graph.notes(), std::move(edges), std::move(hier),
                               graph.metadata());
}

ScoreGraph rebuildEdges(const ScoreGraph& graph) {
  EdgeSet edges = deriveNoteEdges(graph.notes());
  std::optional<Hierarchy> hier;
  if (graph.hierarchy()) {
    auto [h, hier_edges] = deriveHierarchy(graph.notes(), graph.hierarchy()->beat_length,
                                           graph.hierarchy()->measure_length);
    hier = std::move(h);
    edges.insert(hier_edges.begin(), hier_edges.end());
  }
  return ScoreGraph::fromParts(graph.notes(), std::move(edges), std::move(hier),
                               graph.metadata());
}

void validateGraph(const ScoreGraph& graph) {
  for (const Note& n : graph.notes()) validateNote(n);

  // Expected edge set from the rules (plus hierarchy when present).
  EdgeSet expected = deriveNoteEdges(graph.notes());
  if (graph.hierarchy()) {
    auto [h, hier_edges] = deriveHierarchy(graph.notes(), graph.hierarchy()->beat_length,
                                           graph.hierarchy()->measure_length);
    expected.insert(hier_edges.begin(), hier_edges.end());
    // Hierarchy node lists must match the spans implied by the notes.
    const auto same = [](const std::vector<HierarchyNode>& a,
                         const std::vector<HierarchyNode>& b) { return a == b; };
    if (!same(h.beats, graph.hierarchy()->beats) ||
        !same(h.measures, graph.hierarchy()->measures)) {
      throw ValidationError("hierarchy nodes inconsistent with note onsets");
    }
  }
  if (expected != graph.edges()) {
    throw ValidationError("edge set inconsistent with the timing rules");
  }

  for (const Edge& e : graph.edges()) {
    if (e.src == e.dst) throw ValidationError("self edge on '" + e.src + "'");
    const Note* src = graph.findNote(e.src);
    if (src && src->removed) {
      throw ValidationError("removed note '" + e.src + "' participates in an edge");
    }
    const Note* dst = graph.findNote(e.dst);
    if (dst && dst->removed) {
      throw ValidationError("removed note '" + e.dst + "' participates in an edge");
    }
    // At most one of onset/consecutive/during per ordered pair.
    if (e.type == EdgeType::kOnset || e.type == EdgeType::kConsecutive ||
        e.type == EdgeType::kDuring) {
      for (EdgeType other : {EdgeType::kOnset, EdgeType::kConsecutive, EdgeType::kDuring}) {
        if (other != e.type && graph.edges().contains({e.src, e.dst, other})) {
          throw ValidationError("ordered pair (" + e.src + ", " + e.dst +
                                ") carries multiple timing relations");
        }
      }
    }
  }
}

}  // namespace scorecf
