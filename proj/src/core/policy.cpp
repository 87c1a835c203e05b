#include "core/policy.h"

#include <algorithm>
#include <cmath>

#include "core/errors.h"
#include "core/features.h"

namespace scorecf {

PolicyContext::PolicyContext(const ScoreGraph& graph) {
  for (const std::string& id : graph.sortedNoteIds(true)) {
    const Note& n = graph.note(id);
    index_.emplace(id, features_.size());
    features_.push_back(noteFeatures(n));
    pitches_.push_back(n.midi_pitch);
  }
}

std::size_t PolicyContext::indexOf(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("policy context misses note '" + id + "'");
  return it->second;
}

namespace {

int durationIndex(const Rational& d) {
  const auto& all = allowedDurations();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == d) return static_cast<int>(i);
  }
  throw ValidationError("duration " + formatRational(d) + " outside the allowed set");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

PreparedCandidates::PreparedCandidates(const PolicyContext& ctx, std::vector<EditOp> ops,
                                       int pitch_window)
    : ops_(std::move(ops)) {
  entries_.reserve(ops_.size());
  const auto offsetIndex = [pitch_window](int offset) {
    return std::clamp(offset, -pitch_window, pitch_window) + pitch_window;
  };
  for (const EditOp& op : ops_) {
    Entry e{static_cast<int>(op.type), -1, -1, -1, -1};
    switch (op.type) {
      case EditOpType::kChangePitch: {
        e.note = static_cast<int>(ctx.indexOf(op.node_id));
        e.offset = offsetIndex(op.midi_pitch - ctx.pitchAt(static_cast<std::size_t>(e.note)));
        break;
      }
      case EditOpType::kChangeOnset:
        e.note = static_cast<int>(ctx.indexOf(op.node_id));
        e.anchor = static_cast<int>(ctx.indexOf(op.anchor_id));
        break;
      case EditOpType::kChangeDuration:
        e.note = static_cast<int>(ctx.indexOf(op.node_id));
        e.duration = durationIndex(op.duration);
        break;
      case EditOpType::kRemoveNote:
        e.note = static_cast<int>(ctx.indexOf(op.node_id));
        break;
      case EditOpType::kAddNote: {
        e.anchor = static_cast<int>(ctx.indexOf(op.anchor_id));
        e.offset = offsetIndex(op.midi_pitch - ctx.pitchAt(static_cast<std::size_t>(e.anchor)));
        e.duration = durationIndex(op.duration);
        break;
      }
    }
    entries_.push_back(e);
  }
}

InnerPolicy::InnerPolicy(int pitch_window)
    : pitch_window_(pitch_window),
      type_logits_(5, 0.0),
      note_scorer_(kFeatureWidth, 0.0),
      anchor_scorer_(kFeatureWidth, 0.0),
      offset_logits_(static_cast<std::size_t>(2 * pitch_window + 1), 0.0),
      duration_logits_(allowedDurations().size(), 0.0) {
  if (pitch_window <= 0) throw ValidationError("pitch window must be positive");
}

std::vector<double> InnerPolicy::scores(const PolicyContext& ctx,
                                        const PreparedCandidates& batch) const {
  // Per-note selection scores once, then pure lookups per candidate.
  const std::size_t notes = ctx.noteCount();
  std::vector<double> note_dots(notes);
  std::vector<double> anchor_dots(notes);
  for (std::size_t i = 0; i < notes; ++i) {
    note_dots[i] = dot(note_scorer_, ctx.features()[i]);
    anchor_dots[i] = dot(anchor_scorer_, ctx.features()[i]);
  }
  std::vector<double> out;
  out.reserve(batch.size());
  for (const PreparedCandidates::Entry& e : batch.entries()) {
    double s = type_logits_[static_cast<std::size_t>(e.type)];
    if (e.note >= 0) s += note_dots[static_cast<std::size_t>(e.note)];
    if (e.anchor >= 0) s += anchor_dots[static_cast<std::size_t>(e.anchor)];
    if (e.offset >= 0) s += offset_logits_[static_cast<std::size_t>(e.offset)];
    if (e.duration >= 0) s += duration_logits_[static_cast<std::size_t>(e.duration)];
    out.push_back(s);
  }
  return out;
}

std::vector<double> InnerPolicy::softmaxOf(const std::vector<double>& scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::size_t InnerPolicy::sample(const std::vector<double>& probs, Rng& rng) const {
  const double u = rng.uniformReal();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

void InnerPolicy::update(const PolicyContext& ctx, const PreparedCandidates& batch,
                         const std::vector<double>& probs, std::size_t sampled, double advantage,
                         double learning_rate) {
  const double step = learning_rate * advantage;
  if (step == 0.0) return;

  // grad log pi(sampled) = psi(sampled) - E_pi[psi]; accumulate the weight
  // each table/feature slot receives, then apply in one pass.
  std::vector<double> type_mass(type_logits_.size(), 0.0);
  std::vector<double> note_mass(ctx.noteCount(), 0.0);
  std::vector<double> anchor_mass(ctx.noteCount(), 0.0);
  std::vector<double> offset_mass(offset_logits_.size(), 0.0);
  std::vector<double> duration_mass(duration_logits_.size(), 0.0);

  const auto& entries = batch.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double w = (i == sampled ? 1.0 : 0.0) - probs[i];
    if (w == 0.0) continue;
    const PreparedCandidates::Entry& e = entries[i];
    type_mass[static_cast<std::size_t>(e.type)] += w;
    if (e.note >= 0) note_mass[static_cast<std::size_t>(e.note)] += w;
    if (e.anchor >= 0) anchor_mass[static_cast<std::size_t>(e.anchor)] += w;
    if (e.offset >= 0) offset_mass[static_cast<std::size_t>(e.offset)] += w;
    if (e.duration >= 0) duration_mass[static_cast<std::size_t>(e.duration)] += w;
  }

  for (std::size_t t = 0; t < type_logits_.size(); ++t) type_logits_[t] += step * type_mass[t];
  for (std::size_t o = 0; o < offset_logits_.size(); ++o) {
    offset_logits_[o] += step * offset_mass[o];
  }
  for (std::size_t d = 0; d < duration_logits_.size(); ++d) {
    duration_logits_[d] += step * duration_mass[d];
  }
  for (std::size_t i = 0; i < ctx.noteCount(); ++i) {
    const std::vector<double>& f = ctx.features()[i];
    if (note_mass[i] != 0.0) {
      const double c = step * note_mass[i];
      for (std::size_t j = 0; j < note_scorer_.size(); ++j) note_scorer_[j] += c * f[j];
    }
    if (anchor_mass[i] != 0.0) {
      const double c = step * anchor_mass[i];
      for (std::size_t j = 0; j < anchor_scorer_.size(); ++j) anchor_scorer_[j] += c * f[j];
    }
  }
}

std::size_t InnerPolicy::commitIndex(const PolicyContext& ctx,
                                     const PreparedCandidates& batch) const {
  if (batch.empty()) throw SearchError("no candidates to commit");
  const std::vector<double> s = scores(ctx, batch);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  return best;
}

}  // namespace scorecf
