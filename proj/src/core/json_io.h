#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

#include "core/score_graph.h"

namespace scorecf {

// Note-list document: array of {id, onset, duration, midi_pitch, spelling?,
// voice?}. Onset/duration are "p/q" strings (plain integers accepted).
std::vector<Note> parseNoteListJson(const std::string& text);

nlohmann::json noteToJson(const Note& note);
Note noteFromJson(const nlohmann::json& j);
nlohmann::json noteListJson(const std::vector<Note>& notes);

// Graph dump for external visualization: {notes, edges, hierarchy?, metadata}.
nlohmann::json graphDumpJson(const ScoreGraph& graph);
ScoreGraph graphFromDumpJson(const nlohmann::json& j);

// Parses a text document into a JSON value, converting library exceptions
// into ParseError with the byte location.
nlohmann::json parseJsonText(const std::string& text);

}  // namespace scorecf
