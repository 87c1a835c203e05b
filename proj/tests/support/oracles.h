#pragma once

#include <vector>

#include "core/edits.h"
#include "core/rng.h"
#include "core/score_graph.h"

namespace scorecf::testing {

// Literal rule-by-rule evaluation of the four timing relations over all
// ordered pairs of non-removed notes. Independent of the graph module's
// derivation; used as the construction oracle.
EdgeSet bruteForceTimingEdges(const std::vector<Note>& notes);

// bruteForceTimingEdges plus note->beat/measure containment edges when the
// graph carries a hierarchy (floor-division containment per note).
EdgeSet bruteForceAllEdges(const ScoreGraph& graph);

// Independent graph edit distance: symmetric difference of the edge sets plus
// node-set differences (active note ids and hierarchy node ids).
double setDiffGraphDistance(const ScoreGraph& original, const ScoreGraph& cf);

// Random note list on a small rational grid (onsets k/2, durations from a
// small denominator grid), n in [min_notes, max_notes].
std::vector<Note> randomNotes(Rng& rng, int min_notes, int max_notes);

// A random legal edit for the graph, drawn from the enumerated candidate set.
EditOp randomLegalEdit(const ScoreGraph& graph, Rng& rng);

}  // namespace scorecf::testing
