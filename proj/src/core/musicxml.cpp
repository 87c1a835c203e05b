#include "core/musicxml.h"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "core/errors.h"

namespace scorecf {

namespace {

constexpr std::int64_t kMeasureQuarters = 4;  // exported meter is 4/4

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

// Note type name for plain power-of-two durations; empty when none applies.
std::string durationTypeName(const Rational& dur) {
  if (dur == Rational(4)) return "whole";
  if (dur == Rational(2)) return "half";
  if (dur == Rational(1)) return "quarter";
  if (dur == Rational(1, 2)) return "eighth";
  if (dur == Rational(1, 4)) return "16th";
  if (dur == Rational(1, 8)) return "32nd";
  return {};
}

std::int64_t divisionsCount(const Rational& value, std::int64_t divisions) {
  const Rational scaled = value * Rational(divisions);
  return scaled.numerator() / scaled.denominator();  // exact by construction
}

std::string xmlEscape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string toMusicXml(const ScoreGraph& graph, const MusicXmlOptions& options) {
  std::vector<const Note*> notes;
  for (const Note& n : graph.notes()) {
    if (n.removed && !options.include_removed) continue;
    notes.push_back(&n);
  }
  std::sort(notes.begin(), notes.end(), [](const Note* a, const Note* b) {
    if (a->onset != b->onset) return a->onset < b->onset;
    if (a->midi_pitch != b->midi_pitch) return a->midi_pitch < b->midi_pitch;
    return a->id < b->id;
  });

  std::int64_t divisions = 1;
  for (const Note* n : notes) {
    divisions = lcm64(divisions, n->onset.denominator());
    divisions = lcm64(divisions, n->duration.denominator());
  }

  std::int64_t measure_count = 1;
  for (const Note* n : notes) {
    measure_count = std::max(measure_count, floorDiv(n->onset, Rational(kMeasureQuarters)) + 1);
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<score-partwise version=\"3.1\">\n";
  out << "  <part-list>\n";
  out << "    <score-part id=\"P1\">\n";
  out << "      <part-name>"
      << xmlEscape(graph.metadata().piece_name.empty() ? std::string("part")
                                                       : graph.metadata().piece_name)
      << "</part-name>\n";
  out << "    </score-part>\n";
  out << "  </part-list>\n";
  out << "  <part id=\"P1\">\n";

  std::size_t next = 0;
  for (std::int64_t m = 0; m < measure_count; ++m) {
    out << "    <measure number=\"" << (m + 1) << "\">\n";
    if (m == 0) {
      out << "      <attributes>\n";
      out << "        <divisions>" << divisions << "</divisions>\n";
      out << "        <time><beats>4</beats><beat-type>4</beat-type></time>\n";
      out << "      </attributes>\n";
    }
    Rational cursor(m * kMeasureQuarters);
    const Rational measure_end((m + 1) * kMeasureQuarters);
    while (next < notes.size() && notes[next]->onset < measure_end) {
      const Note& n = *notes[next];
      if (n.onset > cursor) {
        out << "      <forward><duration>" << divisionsCount(n.onset - cursor, divisions)
            << "</duration></forward>\n";
      } else if (n.onset < cursor) {
        out << "      <backup><duration>" << divisionsCount(cursor - n.onset, divisions)
            << "</duration></backup>\n";
      }
      const Spelling sp = n.spelling ? *n.spelling : simplestSpelling(n.midi_pitch);
      // Octave re-derived from the pitch so the written spelling always sounds
      // at midi_pitch even when the stored octave is off by an enharmonic wrap.
      const int octave = (n.midi_pitch - stepPitchClass(sp.step) - sp.alter) / 12 - 1;
      out << "      <note";
      if (options.highlight_ids.contains(n.id)) {
        out << " color=\"" << options.highlight_color << "\"";
      }
      out << ">\n";
      out << "        <pitch><step>" << sp.step << "</step>";
      if (sp.alter != 0) out << "<alter>" << sp.alter << "</alter>";
      out << "<octave>" << octave << "</octave></pitch>\n";
      out << "        <duration>" << divisionsCount(n.duration, divisions) << "</duration>\n";
      if (n.voice) out << "        <voice>" << *n.voice << "</voice>\n";
      const std::string type = durationTypeName(n.duration);
      if (!type.empty()) out << "        <type>" << type << "</type>\n";
      out << "      </note>\n";
      cursor = n.end();
      ++next;
    }
    out << "    </measure>\n";
  }
  out << "  </part>\n";
  out << "</score-partwise>\n";
  return out.str();
}

std::vector<Note> parseMusicXml(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("MusicXML parse error: ") + e.what());
  }

  const auto root = doc.get_child_optional("score-partwise");
  if (!root) throw ParseError("MusicXML: missing <score-partwise> root");

  const pt::ptree* part = nullptr;
  for (const auto& [name, child] : *root) {
    if (name != "part") continue;
    if (part) throw ParseError("MusicXML: only single-part documents are supported");
    part = &child;
  }
  if (!part) throw ParseError("MusicXML: missing <part>");

  std::vector<Note> notes;
  std::int64_t divisions = 0;
  Rational measure_quarters(0);  // 0 = continuous cursor, no per-measure reset
  Rational cursor(0);
  Rational last_onset(0);
  std::int64_t measure_index = 0;
  int next_id = 1;

  for (const auto& [mname, measure] : *part) {
    if (mname != "measure") continue;
    if (measure_quarters > Rational(0)) cursor = Rational(measure_index) * measure_quarters;
    for (const auto& [ename, elem] : measure) {
      if (ename == "attributes") {
        if (const auto d = elem.get_optional<std::int64_t>("divisions")) {
          if (*d <= 0) throw ParseError("MusicXML: divisions must be positive");
          divisions = *d;
        }
        if (const auto beats = elem.get_optional<std::int64_t>("time.beats")) {
          const auto beat_type = elem.get_optional<std::int64_t>("time.beat-type");
          if (!beat_type || *beat_type <= 0) {
            throw ParseError("MusicXML: malformed <time>");
          }
          measure_quarters = Rational(*beats) * Rational(4, *beat_type);
        }
      } else if (ename == "backup" || ename == "forward") {
        if (divisions <= 0) throw ParseError("MusicXML: <" + ename + "> before <divisions>");
        const auto d = elem.get_optional<std::int64_t>("duration");
        if (!d) throw ParseError("MusicXML: <" + ename + "> without <duration>");
        const Rational delta(*d, divisions);
        cursor = (ename == "backup") ? cursor - delta : cursor + delta;
      } else if (ename == "note") {
        if (elem.get_child_optional("grace")) {
          throw ParseError("MusicXML: grace notes are not supported");
        }
        if (divisions <= 0) throw ParseError("MusicXML: <note> before <divisions>");
        const auto dur = elem.get_optional<std::int64_t>("duration");
        if (!dur) throw ParseError("MusicXML: <note> without <duration>");
        const Rational duration(*dur, divisions);
        const bool chord = static_cast<bool>(elem.get_child_optional("chord"));
        if (elem.get_child_optional("rest")) {
          if (!chord) cursor += duration;
          continue;
        }
        const auto step = elem.get_optional<std::string>("pitch.step");
        const auto octave = elem.get_optional<int>("pitch.octave");
        if (!step || step->size() != 1 || !octave) {
          throw ParseError("MusicXML: <note> without a valid <pitch>");
        }
        Spelling sp{(*step)[0], elem.get("pitch.alter", 0), *octave};
        Note n;
        n.id = "n" + std::to_string(next_id++);
        n.onset = chord ? last_onset : cursor;
        n.duration = duration;
        n.midi_pitch = spellingMidiPitch(sp);
        n.spelling = sp;
        if (const auto voice = elem.get_optional<int>("voice")) n.voice = *voice;
        validateNote(n);
        last_onset = n.onset;
        if (!chord) cursor = n.onset + duration;
        notes.push_back(std::move(n));
      }
    }
    ++measure_index;
  }
  return notes;
}

}  // namespace scorecf
