#include "core/json_io.h"

#include <nlohmann/json.hpp>

#include "core/errors.h"

namespace scorecf {

using nlohmann::json;

json parseJsonText(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("JSON parse error: ") + e.what());
  }
}

namespace {

Rational rationalField(const json& j, const char* key, const std::string& id) {
  const json& v = j.at(key);
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) return parseRational(v.get<std::string>());
  throw ParseError("note '" + id + "': field '" + key + "' must be an integer or a 'p/q' string");
}

}  // namespace

json noteToJson(const Note& note) {
  json j{{"id", note.id},
         {"onset", formatRational(note.onset)},
         {"duration", formatRational(note.duration)},
         {"midi_pitch", note.midi_pitch}};
  if (note.spelling) {
    j["spelling"] = {{"step", std::string(1, note.spelling->step)},
                     {"alter", note.spelling->alter},
                     {"octave", note.spelling->octave}};
  }
  if (note.voice) j["voice"] = *note.voice;
  if (note.removed) j["removed"] = true;
  return j;
}

Note noteFromJson(const json& j) {
  if (!j.is_object()) throw ParseError("note entry must be an object");
  Note n;
  try {
    n.id = j.at("id").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("note entry missing string 'id': ") + e.what());
  }
  try {
    n.onset = rationalField(j, "onset", n.id);
    n.duration = rationalField(j, "duration", n.id);
    n.midi_pitch = j.at("midi_pitch").get<int>();
    if (j.contains("spelling")) {
      const json& s = j.at("spelling");
      const std::string step = s.at("step").get<std::string>();
      if (step.size() != 1) throw ParseError("note '" + n.id + "': spelling step must be one letter");
      n.spelling = Spelling{step[0], s.at("alter").get<int>(), s.at("octave").get<int>()};
    }
    if (j.contains("voice")) n.voice = j.at("voice").get<int>();
    if (j.contains("removed")) n.removed = j.at("removed").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError("note '" + n.id + "': " + e.what());
  }
  validateNote(n);
  return n;
}

std::vector<Note> parseNoteListJson(const std::string& text) {
  const json doc = parseJsonText(text);
  if (!doc.is_array()) throw ParseError("note-list document must be a JSON array");
  std::vector<Note> notes;
  notes.reserve(doc.size());
  std::set<std::string> seen;
  for (const json& entry : doc) {
    Note n = noteFromJson(entry);
    if (!seen.insert(n.id).second) {
      throw ValidationError("duplicate note id '" + n.id + "'");
    }
    notes.push_back(std::move(n));
  }
  return notes;
}

json noteListJson(const std::vector<Note>& notes) {
  json arr = json::array();
  for (const Note& n : notes) arr.push_back(noteToJson(n));
  return arr;
}

json graphDumpJson(const ScoreGraph& graph) {
  json j;
  j["format"] = "scorecf-graph";
  j["version"] = 1;
  j["notes"] = noteListJson(graph.notes());
  json edges = json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back(json::array({e.src, e.dst, edgeTypeName(e.type)}));
  }
  j["edges"] = std::move(edges);
  if (graph.hierarchy()) {
    const Hierarchy& h = *graph.hierarchy();
    json nodes = json::array();
    for (const auto& list : {h.beats, h.measures}) {
      for (const HierarchyNode& n : list) {
        nodes.push_back({{"id", n.id},
                         {"start", formatRational(n.start)},
                         {"length", formatRational(n.length)}});
      }
    }
    j["hierarchy"] = {{"beat_length", formatRational(h.beat_length)},
                      {"measure_length", formatRational(h.measure_length)},
                      {"nodes", std::move(nodes)}};
  }
  j["metadata"] = {{"piece_name", graph.metadata().piece_name},
                   {"num_classes", graph.metadata().num_classes},
                   {"feature_layout", graph.metadata().feature_layout}};
  return j;
}

ScoreGraph graphFromDumpJson(const json& j) {
  try {
    std::vector<Note> notes;
    for (const json& entry : j.at("notes")) notes.push_back(noteFromJson(entry));

    EdgeSet edges;
    for (const json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw ParseError("edge entries must be [src,dst,type]");
      const auto type = edgeTypeFromName(e[2].get<std::string>());
      if (!type) throw ParseError("unknown edge type '" + e[2].get<std::string>() + "'");
      edges.insert({e[0].get<std::string>(), e[1].get<std::string>(), *type});
    }

    GraphMetadata meta;
    if (j.contains("metadata")) {
      const json& m = j.at("metadata");
      meta.piece_name = m.value("piece_name", "");
      meta.num_classes = m.value("num_classes", 2);
      meta.feature_layout = m.value("feature_layout", "");
    }

    std::optional<Hierarchy> hier;
    if (j.contains("hierarchy")) {
      const json& h = j.at("hierarchy");
      auto [derived, derived_edges] =
          deriveHierarchy(notes, parseRational(h.at("beat_length").get<std::string>()),
                          parseRational(h.at("measure_length").get<std::string>()));
      (void)derived_edges;
      hier = std::move(derived);
    }

    ScoreGraph g = ScoreGraph::fromParts(std::move(notes), std::move(edges), std::move(hier),
                                         std::move(meta));
    validateGraph(g);
    return g;
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph dump: ") + e.what());
  }
}

}  // namespace scorecf
