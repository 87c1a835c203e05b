#include "core/features.h"

#include <cmath>

namespace scorecf {

const std::vector<std::string>& featureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.push_back("pitch_norm");
    for (int pc = 0; pc < 12; ++pc) n.push_back("pitch_class_" + std::to_string(pc));
    n.push_back("log_duration_norm");
    n.push_back("onset_beat_frac");
    return n;
  }();
  return names;
}

std::vector<double> noteFeatures(const Note& note) {
  std::vector<double> f(kFeatureWidth, 0.0);
  f[0] = static_cast<double>(note.midi_pitch) / 127.0;
  f[1 + static_cast<std::size_t>(note.pitchClass())] = 1.0;
  // log2(duration) mapped so that durations in [1/8, 8] quarters land in [0,1].
  f[13] = (std::log2(toDouble(note.duration)) + 3.0) / 6.0;
  const Rational beat_frac = note.onset - Rational(floorDiv(note.onset, Rational(1)));
  f[14] = toDouble(beat_frac);
  return f;
}

std::string featureLayoutId() { return "note-features-v1"; }

}  // namespace scorecf
