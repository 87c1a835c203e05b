#include "core/edits.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

#include "core/errors.h"
#include "core/rng.h"

namespace scorecf {

const char* editOpTypeName(EditOpType type) {
  switch (type) {
    case EditOpType::kChangePitch: return "change_pitch";
    case EditOpType::kChangeOnset: return "change_onset";
    case EditOpType::kChangeDuration: return "change_duration";
    case EditOpType::kRemoveNote: return "remove_note";
    case EditOpType::kAddNote: return "add_note";
  }
  return "unknown";
}

std::optional<EditOpType> editOpTypeFromName(const std::string& name) {
  if (name == "change_pitch" || name == "pitch") return EditOpType::kChangePitch;
  if (name == "change_onset" || name == "onset") return EditOpType::kChangeOnset;
  if (name == "change_duration" || name == "duration" || name == "dur") {
    return EditOpType::kChangeDuration;
  }
  if (name == "remove_note" || name == "remove" || name == "rem") return EditOpType::kRemoveNote;
  if (name == "add_note" || name == "add") return EditOpType::kAddNote;
  return std::nullopt;
}

const std::array<Rational, 4>& allowedDurations() {
  static const std::array<Rational, 4> durations = {Rational(4), Rational(2), Rational(1),
                                                    Rational(1, 2)};
  return durations;
}

bool isAllowedDuration(const Rational& duration) {
  const auto& d = allowedDurations();
  return std::find(d.begin(), d.end(), duration) != d.end();
}

bool canonicalLess(const EditOp& a, const EditOp& b) {
  if (a.type != b.type) return a.type < b.type;
  if (a.node_id != b.node_id) return a.node_id < b.node_id;
  if (a.anchor_id != b.anchor_id) return a.anchor_id < b.anchor_id;
  if (a.midi_pitch != b.midi_pitch) return a.midi_pitch < b.midi_pitch;
  return a.duration > b.duration;  // longer durations enumerate first
}

namespace {

const Note& targetNote(const ScoreGraph& graph, const std::string& id) {
  const Note* n = graph.findNote(id);
  if (!n) {
    if (graph.hasHierarchyNode(id)) {
      throw ValidationError("edit targets hierarchy node '" + id + "'");
    }
    throw ValidationError("unknown node id '" + id + "'");
  }
  if (n->removed) throw ValidationError("edit on removed note '" + id + "'");
  return *n;
}

bool graphCarriesSpellings(const ScoreGraph& graph) {
  for (const Note& n : graph.notes()) {
    if (!n.removed && !n.spelling) return false;
  }
  return graph.activeNoteCount() > 0;
}

// Smallest onset strictly greater than `after`, over active notes; rest edges
// from a note go exactly to the notes starting there.
void rebuildRestEdgesFrom(const std::vector<Note>& notes, const Note& from,
                          const std::map<Rational, std::vector<const Note*>>& by_onset,
                          EdgeSet& edges) {
  const auto it = by_onset.upper_bound(from.end());
  if (it == by_onset.end()) return;
  for (const Note* v : it->second) {
    edges.insert({from.id, v->id, EdgeType::kRest});
  }
}

std::map<Rational, std::vector<const Note*>> activeNotesByOnset(const std::vector<Note>& notes) {
  std::map<Rational, std::vector<const Note*>> by_onset;
  for (const Note& n : notes) {
    if (!n.removed) by_onset[n.onset].push_back(&n);
  }
  return by_onset;
}

void eraseEdgesOfType(EdgeSet& edges, EdgeType type) {
  for (auto it = edges.begin(); it != edges.end();) {
    it = (it->type == type) ? edges.erase(it) : std::next(it);
  }
}

void eraseTimingEdgesIncident(EdgeSet& edges, const std::string& id) {
  for (auto it = edges.begin(); it != edges.end();) {
    const bool timing = it->type == EdgeType::kOnset || it->type == EdgeType::kConsecutive ||
                        it->type == EdgeType::kDuring;
    it = (timing && (it->src == id || it->dst == id)) ? edges.erase(it) : std::next(it);
  }
}

// Re-derives onset/consecutive/during for the ordered pairs involving `v`.
void recomputePairEdges(const std::vector<Note>& notes, const Note& v, EdgeSet& edges) {
  for (const Note& u : notes) {
    if (u.removed || u.id == v.id) continue;
    if (u.onset == v.onset) {
      edges.insert({u.id, v.id, EdgeType::kOnset});
      edges.insert({v.id, u.id, EdgeType::kOnset});
    }
    if (u.end() == v.onset) edges.insert({u.id, v.id, EdgeType::kConsecutive});
    if (v.end() == u.onset) edges.insert({v.id, u.id, EdgeType::kConsecutive});
    if (u.onset < v.onset && u.end() > v.onset) edges.insert({v.id, u.id, EdgeType::kDuring});
    if (v.onset < u.onset && v.end() > u.onset) edges.insert({u.id, v.id, EdgeType::kDuring});
  }
}

}  // namespace

std::string freshNoteId(const ScoreGraph& graph) {
  for (int k = 1;; ++k) {
    std::string id = "added_" + std::to_string(k);
    if (!graph.hasNote(id)) return id;
  }
}

std::pair<ScoreGraph, EditDelta> applyEdit(const ScoreGraph& graph, const EditOp& op) {
  std::vector<Note> notes = graph.notes();
  const auto noteIndex = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < notes.size(); ++i) {
      if (notes[i].id == id) return i;
    }
    throw ValidationError("unknown node id '" + id + "'");
  };

  bool onset_set_changed = false;  // onset multiset of active notes
  std::string affected;            // note whose local edges must be re-derived

  switch (op.type) {
    case EditOpType::kChangePitch: {
      const Note& t = targetNote(graph, op.node_id);
      if (op.midi_pitch < 0 || op.midi_pitch > 127) {
        throw ValidationError("new pitch outside [0,127]");
      }
      Note& n = notes[noteIndex(t.id)];
      n.midi_pitch = op.midi_pitch;
      if (op.spelling) {
        n.spelling = op.spelling;
      } else if (n.spelling) {
        n.spelling = simplestSpelling(op.midi_pitch);
      }
      validateNote(n);
      affected = n.id;
      break;
    }
    case EditOpType::kChangeOnset: {
      const Note& t = targetNote(graph, op.node_id);
      const Note& anchor = targetNote(graph, op.anchor_id);
      if (anchor.id == t.id) throw ValidationError("onset anchor must be another note");
      Note& n = notes[noteIndex(t.id)];
      n.onset = anchor.onset;
      affected = n.id;
      onset_set_changed = true;
      break;
    }
    case EditOpType::kChangeDuration: {
      const Note& t = targetNote(graph, op.node_id);
      if (!isAllowedDuration(op.duration)) {
        throw ValidationError("duration " + formatRational(op.duration) +
                              " outside the allowed set");
      }
      Note& n = notes[noteIndex(t.id)];
      n.duration = op.duration;
      affected = n.id;
      break;
    }
    case EditOpType::kRemoveNote: {
      const Note& t = targetNote(graph, op.node_id);
      Note& n = notes[noteIndex(t.id)];
      n.removed = true;
      affected = n.id;
      onset_set_changed = true;
      break;
    }
    case EditOpType::kAddNote: {
      if (graph.hasNote(op.node_id)) {
        throw ValidationError("AddNote id collision on '" + op.node_id + "'");
      }
      if (op.node_id.starts_with("beat:") || op.node_id.starts_with("measure:")) {
        throw ValidationError("AddNote id collides with the hierarchy id namespace");
      }
      const Note& anchor = targetNote(graph, op.anchor_id);
      if (!isAllowedDuration(op.duration)) {
        throw ValidationError("duration " + formatRational(op.duration) +
                              " outside the allowed set");
      }
      Note n;
      n.id = op.node_id;
      n.onset = anchor.onset;
      n.duration = op.duration;
      n.midi_pitch = op.midi_pitch;
      if (op.spelling) {
        n.spelling = op.spelling;
      } else if (graphCarriesSpellings(graph)) {
        n.spelling = simplestSpelling(op.midi_pitch);
      }
      validateNote(n);
      notes.push_back(std::move(n));
      affected = op.node_id;
      onset_set_changed = true;
      break;
    }
  }

  EdgeSet edges = graph.edges();
  const bool removed_target = op.type == EditOpType::kRemoveNote;

  if (op.type != EditOpType::kChangePitch) {
    eraseTimingEdgesIncident(edges, affected);
    if (op.type == EditOpType::kChangeDuration) {
      // Onset multiset unchanged: only rest edges leaving the note can move.
      for (auto it = edges.begin(); it != edges.end();) {
        it = (it->type == EdgeType::kRest && it->src == affected) ? edges.erase(it)
                                                                  : std::next(it);
      }
    } else {
      eraseEdgesOfType(edges, EdgeType::kRest);
    }

    const auto by_onset = activeNotesByOnset(notes);
    const Note* self = nullptr;
    for (const Note& n : notes) {
      if (n.id == affected) self = &n;
    }
    if (!removed_target) {
      recomputePairEdges(notes, *self, edges);
    }
    if (op.type == EditOpType::kChangeDuration) {
      rebuildRestEdgesFrom(notes, *self, by_onset, edges);
    } else if (onset_set_changed) {
      for (const Note& u : notes) {
        if (!u.removed) rebuildRestEdgesFrom(notes, u, by_onset, edges);
      }
    }
  }

  std::optional<Hierarchy> hierarchy = graph.hierarchy();
  std::set<std::string> added_nodes;
  std::set<std::string> removed_nodes;
  if (op.type == EditOpType::kAddNote) added_nodes.insert(affected);
  if (removed_target) removed_nodes.insert(affected);

  if (graph.hierarchy() && onset_set_changed) {
    auto [new_hier, new_hier_edges] =
        deriveHierarchy(notes, graph.hierarchy()->beat_length, graph.hierarchy()->measure_length);
    for (EdgeType t : {EdgeType::kNoteToBeat, EdgeType::kNoteToMeasure}) eraseEdgesOfType(edges, t);
    edges.insert(new_hier_edges.begin(), new_hier_edges.end());

    const auto nodeIds = [](const Hierarchy& h) {
      std::set<std::string> ids;
      for (const auto& n : h.beats) ids.insert(n.id);
      for (const auto& n : h.measures) ids.insert(n.id);
      return ids;
    };
    const std::set<std::string> old_ids = nodeIds(*graph.hierarchy());
    const std::set<std::string> new_ids = nodeIds(new_hier);
    for (const std::string& id : new_ids) {
      if (!old_ids.contains(id)) added_nodes.insert(id);
    }
    for (const std::string& id : old_ids) {
      if (!new_ids.contains(id)) removed_nodes.insert(id);
    }
    hierarchy = std::move(new_hier);
  }

  EditDelta delta;
  std::set_difference(edges.begin(), edges.end(), graph.edges().begin(), graph.edges().end(),
                      std::inserter(delta.added_edges, delta.added_edges.end()));
  std::set_difference(graph.edges().begin(), graph.edges().end(), edges.begin(), edges.end(),
                      std::inserter(delta.removed_edges, delta.removed_edges.end()));
  delta.added_nodes = std::move(added_nodes);
  delta.removed_nodes = std::move(removed_nodes);

  ScoreGraph result = ScoreGraph::fromParts(std::move(notes), std::move(edges),
                                            std::move(hierarchy), graph.metadata());
  return {std::move(result), std::move(delta)};
}

std::vector<EditOp> candidateEdits(const ScoreGraph& graph, const CandidateOptions& options) {
  const auto allowed = [&](EditOpType t) {
    return !options.allowed_ops || options.allowed_ops->contains(t);
  };
  const std::vector<std::string> ids = graph.sortedNoteIds(true);
  const int window = options.pitch_window;

  std::vector<EditOp> out;
  if (allowed(EditOpType::kChangePitch)) {
    for (const std::string& id : ids) {
      const int pitch = graph.note(id).midi_pitch;
      const int lo = std::max(0, pitch - window);
      const int hi = std::min(127, pitch + window);
      for (int p = lo; p <= hi; ++p) {
        if (p == pitch) continue;
        EditOp op;
        op.type = EditOpType::kChangePitch;
        op.node_id = id;
        op.midi_pitch = p;
        out.push_back(std::move(op));
      }
    }
  }
  if (allowed(EditOpType::kChangeOnset)) {
    for (const std::string& id : ids) {
      const Note& n = graph.note(id);
      for (const std::string& anchor : ids) {
        if (anchor == id || graph.note(anchor).onset == n.onset) continue;
        EditOp op;
        op.type = EditOpType::kChangeOnset;
        op.node_id = id;
        op.anchor_id = anchor;
        out.push_back(std::move(op));
      }
    }
  }
  if (allowed(EditOpType::kChangeDuration)) {
    for (const std::string& id : ids) {
      const Note& n = graph.note(id);
      for (const Rational& d : allowedDurations()) {
        if (d == n.duration) continue;
        EditOp op;
        op.type = EditOpType::kChangeDuration;
        op.node_id = id;
        op.duration = d;
        out.push_back(std::move(op));
      }
    }
  }
  if (allowed(EditOpType::kRemoveNote)) {
    for (const std::string& id : ids) {
      if (id == options.exclude_remove_id) continue;
      EditOp op;
      op.type = EditOpType::kRemoveNote;
      op.node_id = id;
      out.push_back(std::move(op));
    }
  }
  if (allowed(EditOpType::kAddNote) && !ids.empty()) {
    const std::string fresh = freshNoteId(graph);
    for (const std::string& anchor : ids) {
      const int pitch = graph.note(anchor).midi_pitch;
      const int lo = std::max(0, pitch - window);
      const int hi = std::min(127, pitch + window);
      for (int p = lo; p <= hi; ++p) {
        for (const Rational& d : allowedDurations()) {
          EditOp op;
          op.type = EditOpType::kAddNote;
          op.node_id = fresh;
          op.midi_pitch = p;
          op.anchor_id = anchor;
          op.duration = d;
          out.push_back(std::move(op));
        }
      }
    }
  }

  if (options.max_candidates > 0 &&
      out.size() > static_cast<std::size_t>(options.max_candidates)) {
    Rng rng(options.seed);
    const auto keep =
        rng.sampleIndices(out.size(), static_cast<std::size_t>(options.max_candidates));
    std::vector<EditOp> sampled;
    sampled.reserve(keep.size());
    for (const std::size_t i : keep) sampled.push_back(std::move(out[i]));
    out = std::move(sampled);
  }
  return out;
}

ScoreGraph replay(const ScoreGraph& original, const EditLog& log) {
  ScoreGraph current = original;
  for (std::size_t i = 0; i < log.size(); ++i) {
    auto [next, delta] = applyEdit(current, log[i].op);
    if (delta != log[i].delta) {
      throw SearchError("replay divergence at op " + std::to_string(i) + " (" +
                        editOpTypeName(log[i].op.type) + " on '" + log[i].op.node_id + "')");
    }
    current = std::move(next);
  }
  return current;
}

EditDelta composeDeltas(const EditLog& log) {
  EditDelta net;
  const auto fold = [](auto& added, auto& removed, const auto& new_added,
                       const auto& new_removed) {
    for (const auto& e : new_added) {
      if (removed.contains(e)) {
        removed.erase(e);
      } else {
        added.insert(e);
      }
    }
    for (const auto& e : new_removed) {
      if (added.contains(e)) {
        added.erase(e);
      } else {
        removed.insert(e);
      }
    }
  };
  for (const EditLogEntry& entry : log) {
    fold(net.added_edges, net.removed_edges, entry.delta.added_edges, entry.delta.removed_edges);
    fold(net.added_nodes, net.removed_nodes, entry.delta.added_nodes, entry.delta.removed_nodes);
  }
  return net;
}

using nlohmann::json;

json editOpToJson(const EditOp& op) {
  json j{{"op", editOpTypeName(op.type)}, {"node", op.node_id}};
  switch (op.type) {
    case EditOpType::kChangePitch:
      j["midi_pitch"] = op.midi_pitch;
      break;
    case EditOpType::kChangeOnset:
      j["anchor"] = op.anchor_id;
      break;
    case EditOpType::kChangeDuration:
      j["duration"] = formatRational(op.duration);
      break;
    case EditOpType::kRemoveNote:
      break;
    case EditOpType::kAddNote:
      j["midi_pitch"] = op.midi_pitch;
      j["anchor"] = op.anchor_id;
      j["duration"] = formatRational(op.duration);
      break;
  }
  if (op.spelling) {
    j["spelling"] = {{"step", std::string(1, op.spelling->step)},
                     {"alter", op.spelling->alter},
                     {"octave", op.spelling->octave}};
  }
  return j;
}

EditOp editOpFromJson(const json& j) {
  try {
    const std::string tag = j.at("op").get<std::string>();
    const auto type = editOpTypeFromName(tag);
    if (!type) throw ParseError("unknown edit op '" + tag + "'");
    EditOp op;
    op.type = *type;
    op.node_id = j.at("node").get<std::string>();
    if (j.contains("midi_pitch")) op.midi_pitch = j.at("midi_pitch").get<int>();
    if (j.contains("anchor")) op.anchor_id = j.at("anchor").get<std::string>();
    if (j.contains("duration")) op.duration = parseRational(j.at("duration").get<std::string>());
    if (j.contains("spelling")) {
      const json& s = j.at("spelling");
      const std::string step = s.at("step").get<std::string>();
      if (step.size() != 1) throw ParseError("spelling step must be one letter");
      op.spelling = Spelling{step[0], s.at("alter").get<int>(), s.at("octave").get<int>()};
    }
    return op;
  } catch (const json::exception& e) {
    throw ParseError(std::string("edit op: ") + e.what());
  }
}

json editDeltaToJson(const EditDelta& delta) {
  const auto edgeArray = [](const EdgeSet& edges) {
    json arr = json::array();
    for (const Edge& e : edges) arr.push_back(json::array({e.src, e.dst, edgeTypeName(e.type)}));
    return arr;
  };
  return json{{"added_edges", edgeArray(delta.added_edges)},
              {"removed_edges", edgeArray(delta.removed_edges)},
              {"added_nodes", delta.added_nodes},
              {"removed_nodes", delta.removed_nodes}};
}

EditDelta editDeltaFromJson(const json& j) {
  try {
    EditDelta delta;
    const auto parseEdges = [](const json& arr, EdgeSet& out) {
      for (const json& e : arr) {
        if (!e.is_array() || e.size() != 3) {
          throw ParseError("delta edge entries must be [src,dst,type]");
        }
        const auto type = edgeTypeFromName(e[2].get<std::string>());
        if (!type) throw ParseError("unknown edge type '" + e[2].get<std::string>() + "'");
        out.insert({e[0].get<std::string>(), e[1].get<std::string>(), *type});
      }
    };
    parseEdges(j.at("added_edges"), delta.added_edges);
    parseEdges(j.at("removed_edges"), delta.removed_edges);
    delta.added_nodes = j.at("added_nodes").get<std::set<std::string>>();
    delta.removed_nodes = j.at("removed_nodes").get<std::set<std::string>>();
    return delta;
  } catch (const json::exception& e) {
    throw ParseError(std::string("edit delta: ") + e.what());
  }
}

json editLogToJson(const EditLog& log) {
  json arr = json::array();
  for (const EditLogEntry& entry : log) {
    arr.push_back(json{{"op", editOpToJson(entry.op)}, {"delta", editDeltaToJson(entry.delta)}});
  }
  return arr;
}

}  // namespace scorecf
