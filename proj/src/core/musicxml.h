#pragma once

#include <set>
#include <string>
#include <vector>

#include "core/score_graph.h"

namespace scorecf {

struct MusicXmlOptions {
  // Notes whose ids appear here get a color attribute in the output.
  std::set<std::string> highlight_ids;
  std::string highlight_color = "#800080";
  // Removed notes are omitted from the score by default.
  bool include_removed = false;
};

// Partwise document, single part, pitch/duration/voice only. Divisions are
// chosen so every onset and duration is an exact integer count; overlapping
// notes are positioned with backup/forward.
std::string toMusicXml(const ScoreGraph& graph, const MusicXmlOptions& options = {});

// Parses the subset written by toMusicXml (and tolerates plain single-part
// partwise files: rests, chords, multiple voices). Note ids are generated in
// document order. Throws ParseError/ValidationError.
std::vector<Note> parseMusicXml(const std::string& text);

}  // namespace scorecf
