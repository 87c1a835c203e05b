#pragma once

#include <string>
#include <vector>

#include "core/note.h"

namespace scorecf {

// Fixed per-note feature layout consumed by classifiers and the node
// distance: [pitch/127, pitch-class one-hot (12), normalized log2 duration,
// fractional beat position of the onset].
inline constexpr int kFeatureWidth = 15;

const std::vector<std::string>& featureNames();

// Deterministic function of the note's pitch, duration, and onset.
std::vector<double> noteFeatures(const Note& note);

std::string featureLayoutId();

}  // namespace scorecf
