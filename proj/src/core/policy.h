#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/edits.h"
#include "core/rng.h"
#include "core/score_graph.h"

namespace scorecf {

// Note features and pitches of one graph, cached for the duration of a
// training round.
class PolicyContext {
 public:
  explicit PolicyContext(const ScoreGraph& graph);

  std::size_t noteCount() const { return features_.size(); }
  const std::vector<std::vector<double>>& features() const { return features_; }
  std::size_t indexOf(const std::string& id) const;
  int pitchAt(std::size_t index) const { return pitches_[index]; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> features_;
  std::vector<int> pitches_;
};

// Candidate set with ids, pitch offsets, and durations resolved to indices so
// scoring is pure array arithmetic across the training iterations of a round.
class PreparedCandidates {
 public:
  PreparedCandidates(const PolicyContext& ctx, std::vector<EditOp> ops, int pitch_window);

  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }
  const std::vector<EditOp>& ops() const { return ops_; }

  struct Entry {
    int type;
    int note;    // feature index of the target note, -1 when unused
    int anchor;  // feature index of the anchor note, -1 when unused
    int offset;  // pitch-offset table index, -1 when unused
    int duration;  // duration table index, -1 when unused
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<EditOp> ops_;
  std::vector<Entry> entries_;
};

// Learnable scorer over edit candidates: logits per operation type plus
// parameter scorers (note selection and anchor selection from note features,
// pitch-offset table, duration table). The induced distribution is the
// softmax of candidate scores; training is a score-function gradient on
// (loss - running baseline).
class InnerPolicy {
 public:
  explicit InnerPolicy(int pitch_window);

  std::vector<double> scores(const PolicyContext& ctx, const PreparedCandidates& batch) const;

  static std::vector<double> softmaxOf(const std::vector<double>& scores);

  std::size_t sample(const std::vector<double>& probs, Rng& rng) const;

  // One gradient step for the sampled candidate. probs must be softmaxOf the
  // current scores for exactly this batch; advantage is (baseline - loss), so
  // positive reinforces the sample.
  void update(const PolicyContext& ctx, const PreparedCandidates& batch,
              const std::vector<double>& probs, std::size_t sampled, double advantage,
              double learning_rate);

  // Highest-probability candidate; ties resolve to the earliest entry
  // (batches keep the canonical candidate order).
  std::size_t commitIndex(const PolicyContext& ctx, const PreparedCandidates& batch) const;

  int pitchWindow() const { return pitch_window_; }

 private:
  int pitch_window_;
  std::vector<double> type_logits_;      // per EditOpType
  std::vector<double> note_scorer_;      // feature width
  std::vector<double> anchor_scorer_;    // feature width
  std::vector<double> offset_logits_;    // 2*window + 1
  std::vector<double> duration_logits_;  // allowed durations
};

}  // namespace scorecf
