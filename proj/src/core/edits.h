#pragma once

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/score_graph.h"

namespace scorecf {

enum class EditOpType {
  kChangePitch,
  kChangeOnset,
  kChangeDuration,
  kRemoveNote,
  kAddNote,
};

const char* editOpTypeName(EditOpType type);
// Accepts the canonical tag and short aliases (pitch, onset, dur, rem, add).
std::optional<EditOpType> editOpTypeFromName(const std::string& name);

// Durations an edit may assign, in quarter units (whole through eighth).
const std::array<Rational, 4>& allowedDurations();
bool isAllowedDuration(const Rational& duration);

// One musically coherent modification. New onsets are always copied from an
// anchor note, never free values.
struct EditOp {
  EditOpType type = EditOpType::kChangePitch;
  std::string node_id;                  // target note; the new id for AddNote
  int midi_pitch = -1;                  // ChangePitch, AddNote
  std::optional<Spelling> spelling;     // optional explicit respelling
  std::string anchor_id;                // ChangeOnset, AddNote
  Rational duration{0};                 // ChangeDuration, AddNote

  bool operator==(const EditOp&) const = default;
};

// Stable ordering used for tie-breaking and enumeration: op type, node id,
// then parameters.
bool canonicalLess(const EditOp& a, const EditOp& b);

// Exact node/edge difference produced by one edit.
struct EditDelta {
  EdgeSet added_edges;
  EdgeSet removed_edges;
  std::set<std::string> added_nodes;
  std::set<std::string> removed_nodes;

  bool empty() const {
    return added_edges.empty() && removed_edges.empty() && added_nodes.empty() &&
           removed_nodes.empty();
  }
  std::size_t size() const {
    return added_edges.size() + removed_edges.size() + added_nodes.size() + removed_nodes.size();
  }
  bool operator==(const EditDelta&) const = default;
};

struct EditLogEntry {
  EditOp op;
  EditDelta delta;
};

using EditLog = std::vector<EditLogEntry>;

// Applies one edit, maintaining the edge set incrementally (only the pairs
// the edit can affect are re-derived; rest edges are rebuilt from the onset
// order when the onset multiset changes). The result must equal a full
// rebuild; the delta is the exact symmetric difference. RemoveNote keeps the
// note in the collection, isolated and flagged.
std::pair<ScoreGraph, EditDelta> applyEdit(const ScoreGraph& graph, const EditOp& op);

struct CandidateOptions {
  std::optional<std::set<EditOpType>> allowed_ops;  // nullopt = all five
  int pitch_window = 12;
  int max_candidates = 4096;  // 0 = no subsampling
  std::uint64_t seed = 0;
  std::string exclude_remove_id;  // RemoveNote never targets this note
};

// Enumerates every legal edit in canonical order, deterministically
// subsampling when the legal set exceeds max_candidates.
std::vector<EditOp> candidateEdits(const ScoreGraph& graph, const CandidateOptions& options);

// Fresh id for an AddNote candidate on this graph.
std::string freshNoteId(const ScoreGraph& graph);

// Applies the logged ops in order, checking each recorded delta against the
// recomputed one; throws SearchError on divergence.
ScoreGraph replay(const ScoreGraph& original, const EditLog& log);

// Net delta after cancelling add/remove pairs across the log.
EditDelta composeDeltas(const EditLog& log);

nlohmann::json editOpToJson(const EditOp& op);
EditOp editOpFromJson(const nlohmann::json& j);
nlohmann::json editDeltaToJson(const EditDelta& delta);
EditDelta editDeltaFromJson(const nlohmann::json& j);
nlohmann::json editLogToJson(const EditLog& log);

}  // namespace scorecf
