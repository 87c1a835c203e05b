#pragma once

#include <optional>
#include <string>

#include "core/rational.h"

namespace scorecf {

// Notated pitch: letter step, accidental count, octave (C4 = middle C).
struct Spelling {
  char step = 'C';  // 'A'..'G'
  int alter = 0;    // -2..2
  int octave = 4;

  bool operator==(const Spelling&) const = default;
};

// Pitch class (0..11) of the diatonic step letter, C = 0.
int stepPitchClass(char step);

// Pitch class implied by a spelling, reduced mod 12.
int spellingPitchClass(const Spelling& spelling);

// MIDI number implied by a spelling (C4 = 60).
int spellingMidiPitch(const Spelling& spelling);

// Spelling with the fewest accidentals for a MIDI pitch; ties go to sharps.
Spelling simplestSpelling(int midi_pitch);

// One score event. Onset and duration are exact rationals in quarter-note
// units; a removed note stays in the collection but participates in no edges.
struct Note {
  std::string id;
  Rational onset{0};
  Rational duration{1};
  int midi_pitch = 60;
  std::optional<Spelling> spelling;
  std::optional<int> voice;
  bool removed = false;

  Rational end() const { return onset + duration; }
  int pitchClass() const { return ((midi_pitch % 12) + 12) % 12; }

  bool operator==(const Note&) const = default;
};

// Throws ValidationError (naming the note id) when a field is out of range,
// the duration is not positive, or the spelling disagrees with midi_pitch.
void validateNote(const Note& note);

}  // namespace scorecf
