#include "core/synth.h"

#include <algorithm>

#include "core/edits.h"
#include "core/errors.h"

namespace scorecf {

ScoreGraph synthPiece(int note_count, Rng& rng, const std::string& piece_name, int num_classes) {
  if (note_count <= 0) throw ValidationError("piece size must be positive");
  // Half as many grid slots as notes keeps same-onset pairs common.
  const std::int64_t grid_slots = std::max<std::int64_t>(2, note_count);
  std::vector<Note> notes;
  notes.reserve(static_cast<std::size_t>(note_count));
  for (int i = 0; i < note_count; ++i) {
    Note n;
    n.id = "n" + std::to_string(i + 1);
    n.onset = Rational(rng.uniformInt(0, grid_slots - 1), 2);
    n.duration = allowedDurations()[static_cast<std::size_t>(rng.uniformInt(0, 3))];
    n.midi_pitch = static_cast<int>(rng.uniformInt(36, 84));
    notes.push_back(std::move(n));
  }
  GraphMetadata meta;
  meta.piece_name = piece_name;
  meta.num_classes = num_classes;
  return buildGraph(std::move(notes), std::move(meta));
}

std::vector<LabeledGraph> synthDataset(const SynthOptions& options,
                                       const NodeClassifier& labeler) {
  if (options.num_pieces <= 0 || options.notes_per_piece <= 0) {
    throw ValidationError("dataset sizes must be positive");
  }
  Rng rng(options.seed);
  std::vector<LabeledGraph> dataset;
  dataset.reserve(static_cast<std::size_t>(options.num_pieces));
  for (int p = 0; p < options.num_pieces; ++p) {
    ScoreGraph graph = synthPiece(options.notes_per_piece, rng,
                                  "synth_" + std::to_string(p + 1), labeler.numClasses());
    std::map<std::string, int> labels;
    for (const auto& [id, dist] : labeler.classify(graph)) {
      labels[id] =
          static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    }
    dataset.emplace_back(std::move(graph), std::move(labels));
  }
  return dataset;
}

}  // namespace scorecf
