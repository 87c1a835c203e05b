#include "core/json_io.h"
#include "core/musicxml.h"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <tuple>

#include "core/errors.h"
#include "core/rng.h"
#include "support/oracles.h"

namespace scorecf {
namespace {

using PitchEvent = std::tuple<Rational, Rational, int>;

std::vector<PitchEvent> eventMultiset(const std::vector<Note>& notes, bool include_removed) {
  std::vector<PitchEvent> events;
  for (const Note& n : notes) {
    if (n.removed && !include_removed) continue;
    events.emplace_back(n.onset, n.duration, n.midi_pitch);
  }
  std::sort(events.begin(), events.end());
  return events;
}

TEST(NoteListJsonTest, SingleRecordRoundTrip) {
  const auto notes =
      parseNoteListJson(R"([{"id":"n1","onset":"0","duration":"1","midi_pitch":60}])");
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_EQ(notes[0].id, "n1");
  EXPECT_EQ(notes[0].onset, Rational(0));
  EXPECT_EQ(notes[0].duration, Rational(1));
  EXPECT_EQ(notes[0].midi_pitch, 60);
  EXPECT_FALSE(notes[0].spelling.has_value());

  const auto again = parseNoteListJson(noteListJson(notes).dump());
  EXPECT_EQ(notes, again);
}

TEST(NoteListJsonTest, EmptyList) {
  EXPECT_TRUE(parseNoteListJson("[]").empty());
}

TEST(NoteListJsonTest, AcceptsIntegerOnsetsAndSpelling) {
  const auto notes = parseNoteListJson(
      R"([{"id":"a","onset":2,"duration":"3/2","midi_pitch":61,
           "spelling":{"step":"C","alter":1,"octave":4},"voice":2}])");
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_EQ(notes[0].onset, Rational(2));
  EXPECT_EQ(notes[0].duration, Rational(3, 2));
  ASSERT_TRUE(notes[0].spelling.has_value());
  EXPECT_EQ(notes[0].spelling->step, 'C');
  EXPECT_EQ(notes[0].voice, 2);
}

TEST(NoteListJsonTest, MalformedDocumentReportsLocation) {
  try {
    parseNoteListJson("[{\"id\":}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("parse error"), std::string::npos);
  }
}

TEST(NoteListJsonTest, NegativeDurationNamesNote) {
  try {
    parseNoteListJson(R"([{"id":"n7","onset":"0","duration":"-1","midi_pitch":60}])");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n7"), std::string::npos);
  }
}

TEST(NoteListJsonTest, ZeroDurationRejected) {
  EXPECT_THROW(parseNoteListJson(R"([{"id":"g","onset":"0","duration":"0","midi_pitch":60}])"),
               ValidationError);
}

TEST(NoteListJsonTest, DuplicateIdsRejected) {
  EXPECT_THROW(parseNoteListJson(R"([{"id":"x","onset":"0","duration":"1","midi_pitch":60},
                                     {"id":"x","onset":"1","duration":"1","midi_pitch":62}])"),
               ValidationError);
}

TEST(GraphDumpTest, RoundTripsThroughJson) {
  Rng rng(31);
  const ScoreGraph g = attachHierarchy(buildGraph(testing::randomNotes(rng, 3, 15)),
                                       Rational(1), Rational(4));
  const ScoreGraph parsed = graphFromDumpJson(graphDumpJson(g));
  EXPECT_EQ(parsed.notes(), g.notes());
  EXPECT_EQ(parsed.edges(), g.edges());
  ASSERT_TRUE(parsed.hierarchy().has_value());
  EXPECT_EQ(parsed.hierarchy()->beats, g.hierarchy()->beats);
}

TEST(GraphDumpTest, RejectsTamperedEdgeList) {
  const ScoreGraph g = buildGraph(parseNoteListJson(
      R"([{"id":"u","onset":"0","duration":"1","midi_pitch":60},
          {"id":"v","onset":"1","duration":"1","midi_pitch":64}])"));
  nlohmann::json dump = graphDumpJson(g);
  dump["edges"].push_back({"u", "v", "onset"});
  EXPECT_THROW(graphFromDumpJson(dump), ValidationError);
}

TEST(MusicXmlTest, QuarterNoteCFourMatchesJsonPath) {
  const char* xml = R"(<?xml version="1.0" encoding="UTF-8"?>
<score-partwise version="3.1">
  <part-list><score-part id="P1"><part-name>p</part-name></score-part></part-list>
  <part id="P1">
    <measure number="1">
      <attributes>
        <divisions>1</divisions>
        <time><beats>4</beats><beat-type>4</beat-type></time>
      </attributes>
      <note>
        <pitch><step>C</step><octave>4</octave></pitch>
        <duration>1</duration>
        <type>quarter</type>
      </note>
    </measure>
  </part>
</score-partwise>)";
  const auto from_xml = parseMusicXml(xml);
  const auto from_json =
      parseNoteListJson(R"([{"id":"n1","onset":"0","duration":"1","midi_pitch":60}])");
  ASSERT_EQ(from_xml.size(), 1u);
  EXPECT_EQ(from_xml[0].onset, from_json[0].onset);
  EXPECT_EQ(from_xml[0].duration, from_json[0].duration);
  EXPECT_EQ(from_xml[0].midi_pitch, from_json[0].midi_pitch);
}

TEST(MusicXmlTest, ChordAndRestAndBackup) {
  const char* xml = R"(<score-partwise>
  <part-list><score-part id="P1"><part-name>p</part-name></score-part></part-list>
  <part id="P1">
    <measure number="1">
      <attributes><divisions>2</divisions></attributes>
      <note><rest/><duration>2</duration></note>
      <note><pitch><step>C</step><octave>4</octave></pitch><duration>2</duration></note>
      <note><chord/><pitch><step>E</step><octave>4</octave></pitch><duration>2</duration></note>
      <backup><duration>1</duration></backup>
      <note><pitch><step>G</step><octave>4</octave></pitch><duration>1</duration></note>
    </measure>
  </part>
</score-partwise>)";
  const auto notes = parseMusicXml(xml);
  ASSERT_EQ(notes.size(), 3u);
  EXPECT_EQ(notes[0].onset, Rational(1));  // after the rest
  EXPECT_EQ(notes[1].onset, Rational(1));  // chord with the first
  EXPECT_EQ(notes[1].midi_pitch, 64);
  EXPECT_EQ(notes[2].onset, Rational(3, 2));  // backup of one eighth
}

TEST(MusicXmlTest, RandomPieceRoundTripPreservesEvents) {
  Rng rng(32);
  for (int round = 0; round < 25; ++round) {
    const std::vector<Note> notes = testing::randomNotes(rng, 1, 20);
    const ScoreGraph g = buildGraph(notes);
    const std::vector<Note> back = parseMusicXml(toMusicXml(g));
    EXPECT_EQ(eventMultiset(back, false), eventMultiset(notes, false)) << "round " << round;
  }
}

TEST(MusicXmlTest, RemovedNotesOmitted) {
  std::vector<Note> notes = parseNoteListJson(
      R"([{"id":"u","onset":"0","duration":"1","midi_pitch":60},
          {"id":"v","onset":"1","duration":"1","midi_pitch":64}])");
  notes[1].removed = true;
  const std::vector<Note> back = parseMusicXml(toMusicXml(buildGraph(notes)));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].midi_pitch, 60);
}

TEST(MusicXmlTest, HighlightAddsColorAttribute) {
  const ScoreGraph g = buildGraph(parseNoteListJson(
      R"([{"id":"u","onset":"0","duration":"1","midi_pitch":60}])"));
  MusicXmlOptions options;
  options.highlight_ids = {"u"};
  const std::string xml = toMusicXml(g, options);
  EXPECT_NE(xml.find("color=\"#800080\""), std::string::npos);
  EXPECT_EQ(toMusicXml(g).find("color"), std::string::npos);
}

TEST(MusicXmlTest, MultiplePartsRejected) {
  const char* xml = R"(<score-partwise>
  <part-list/>
  <part id="P1"/>
  <part id="P2"/>
</score-partwise>)";
  EXPECT_THROW(parseMusicXml(xml), ParseError);
}

TEST(MusicXmlTest, GraceNotesRejected) {
  const char* xml = R"(<score-partwise>
  <part-list/>
  <part id="P1">
    <measure number="1">
      <attributes><divisions>1</divisions></attributes>
      <note><grace/><pitch><step>C</step><octave>4</octave></pitch></note>
    </measure>
  </part>
</score-partwise>)";
  EXPECT_THROW(parseMusicXml(xml), ParseError);
}

}  // namespace
}  // namespace scorecf
