#pragma once

#include <vector>

#include "core/model.h"
#include "core/rng.h"
#include "core/score_graph.h"

namespace scorecf {

struct SynthOptions {
  int num_pieces = 1;
  int notes_per_piece = 16;
  std::uint64_t seed = 0;
};

// Random coherent piece: onsets on an eighth-note grid packed densely enough
// for simultaneities, durations from the allowed edit set, pitches 36..84.
ScoreGraph synthPiece(int note_count, Rng& rng, const std::string& piece_name,
                      int num_classes = 2);

// Labels every note of every piece with the labeler's argmax class.
std::vector<LabeledGraph> synthDataset(const SynthOptions& options,
                                       const NodeClassifier& labeler);

}  // namespace scorecf
