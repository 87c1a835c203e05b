#include "core/note.h"

#include <array>

#include "core/errors.h"

namespace scorecf {

namespace {

// Step letters are notated A..G but pitch classes count from C.
constexpr std::array<int, 7> kStepClass = {9, 11, 0, 2, 4, 5, 7};  // A B C D E F G

// pc -> (step, alter) with the fewest accidentals, sharps on ties.
struct StepAlter {
  char step;
  int alter;
};
constexpr std::array<StepAlter, 12> kSimple = {{{'C', 0},
                                                {'C', 1},
                                                {'D', 0},
                                                {'D', 1},
                                                {'E', 0},
                                                {'F', 0},
                                                {'F', 1},
                                                {'G', 0},
                                                {'G', 1},
                                                {'A', 0},
                                                {'A', 1},
                                                {'B', 0}}};

}  // namespace

int stepPitchClass(char step) {
  if (step < 'A' || step > 'G') {
    throw ValidationError(std::string("invalid spelling step '") + step + "'");
  }
  return kStepClass[static_cast<std::size_t>(step - 'A')];
}

int spellingPitchClass(const Spelling& spelling) {
  return ((stepPitchClass(spelling.step) + spelling.alter) % 12 + 12) % 12;
}

int spellingMidiPitch(const Spelling& spelling) {
  return (spelling.octave + 1) * 12 + stepPitchClass(spelling.step) + spelling.alter;
}

Spelling simplestSpelling(int midi_pitch) {
  const int pc = ((midi_pitch % 12) + 12) % 12;
  const StepAlter sa = kSimple[static_cast<std::size_t>(pc)];
  // Octave such that (octave+1)*12 + stepClass + alter == midi_pitch.
  const int octave = (midi_pitch - stepPitchClass(sa.step) - sa.alter) / 12 - 1;
  return Spelling{sa.step, sa.alter, octave};
}

void validateNote(const Note& note) {
  if (note.id.empty()) throw ValidationError("note with empty id");
  if (note.onset < Rational(0)) {
    throw ValidationError("note '" + note.id + "' has negative onset");
  }
  if (note.duration <= Rational(0)) {
    throw ValidationError("note '" + note.id + "' has non-positive duration");
  }
  if (note.midi_pitch < 0 || note.midi_pitch > 127) {
    throw ValidationError("note '" + note.id + "' has midi_pitch outside [0,127]");
  }
  if (note.spelling) {
    if (note.spelling->step < 'A' || note.spelling->step > 'G') {
      throw ValidationError("note '" + note.id + "' has invalid spelling step");
    }
    if (note.spelling->alter < -2 || note.spelling->alter > 2) {
      throw ValidationError("note '" + note.id + "' has spelling alter outside [-2,2]");
    }
    if (spellingPitchClass(*note.spelling) != note.pitchClass()) {
      throw ValidationError("note '" + note.id +
                            "' spelling disagrees with midi_pitch pitch class");
    }
  }
}

}  // namespace scorecf
