#include "core/features.h"

#include <gtest/gtest.h>

namespace scorecf {
namespace {

Note makeNote(int pitch, const Rational& onset, const Rational& duration) {
  Note n;
  n.id = "n";
  n.midi_pitch = pitch;
  n.onset = onset;
  n.duration = duration;
  return n;
}

TEST(FeaturesTest, PitchClassOneHot) {
  const auto f = noteFeatures(makeNote(60, Rational(0), Rational(1)));
  ASSERT_EQ(f.size(), static_cast<std::size_t>(kFeatureWidth));
  EXPECT_DOUBLE_EQ(f[1], 1.0);  // class C
  for (int pc = 1; pc < 12; ++pc) EXPECT_DOUBLE_EQ(f[1 + pc], 0.0);
}

TEST(FeaturesTest, Deterministic) {
  const Note n = makeNote(71, Rational(5, 2), Rational(1, 2));
  EXPECT_EQ(noteFeatures(n), noteFeatures(n));
}

TEST(FeaturesTest, PitchBoundary) {
  EXPECT_DOUBLE_EQ(noteFeatures(makeNote(127, Rational(0), Rational(1)))[0], 1.0);
  EXPECT_DOUBLE_EQ(noteFeatures(makeNote(0, Rational(0), Rational(1)))[0], 0.0);
}

TEST(FeaturesTest, OnsetBeatFraction) {
  EXPECT_DOUBLE_EQ(noteFeatures(makeNote(60, Rational(7, 2), Rational(1)))[14], 0.5);
  EXPECT_DOUBLE_EQ(noteFeatures(makeNote(60, Rational(4), Rational(1)))[14], 0.0);
}

TEST(FeaturesTest, NamesMatchWidth) {
  EXPECT_EQ(featureNames().size(), static_cast<std::size_t>(kFeatureWidth));
}

}  // namespace
}  // namespace scorecf
