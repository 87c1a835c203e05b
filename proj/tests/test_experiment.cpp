#include "core/experiment.h"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>

#include "core/errors.h"
#include "core/rng.h"
#include "core/synth.h"
#include "support/oracles.h"

namespace scorecf {
namespace {

std::vector<ScoreGraph> somePieces(int count, int notes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScoreGraph> pieces;
  for (int i = 0; i < count; ++i) {
    pieces.push_back(synthPiece(notes, rng, "piece_" + std::to_string(i + 1)));
  }
  return pieces;
}

ExperimentCell cell(const std::string& name, int target_label, ExplainMode mode) {
  ExperimentCell c;
  c.name = name;
  c.config.n = 3;
  c.config.t = 5;
  c.config.target_label = target_label;
  c.config.mode = mode;
  c.config.max_candidates = 200;
  return c;
}

TEST(ExperimentTest, SingleCellHasFiveMetricRows) {
  const RuleClassifier model = RuleClassifier::cadenceLike();
  const auto table = runExperiment(model, somePieces(1, 8, 1),
                                   {cell("solo", 1, ExplainMode::kGreedy)}, {.repeats = 5});
  ASSERT_EQ(table.at("cells").size(), 1u);
  const nlohmann::json& metrics = table.at("cells")[0].at("metrics");
  ASSERT_EQ(metrics.size(), 5u);
  for (const char* key : {"accuracy", "min_changes", "operation", "distance", "time"}) {
    EXPECT_TRUE(metrics.contains(key)) << key;
  }
  EXPECT_EQ(table.at("cells")[0].at("runs").size(), 5u);
}

TEST(ExperimentTest, ConstantCorrectModelScoresFullAccuracy) {
  const ConstantClassifier model({0.0, 1.0}, {"NC", "PAC"});
  const auto table = runExperiment(model, somePieces(2, 6, 2),
                                   {cell("const", 1, ExplainMode::kGreedy)}, {.repeats = 2});
  const nlohmann::json& metrics = table.at("cells")[0].at("metrics");
  EXPECT_DOUBLE_EQ(metrics.at("accuracy").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(metrics.at("min_changes").at("mean").get<double>(), 0.0);
  EXPECT_EQ(metrics.at("operation").get<std::string>(), "none");
}

TEST(ExperimentTest, DeterministicGivenSeed) {
  const RuleClassifier model = RuleClassifier::cadenceLike();
  const auto pieces = somePieces(2, 8, 3);
  const std::vector<ExperimentCell> grid{cell("a", 1, ExplainMode::kLearned)};
  const auto x = runExperiment(model, pieces, grid, {.repeats = 2, .seed = 11});
  const auto y = runExperiment(model, pieces, grid, {.repeats = 2, .seed = 11});
  EXPECT_EQ(x, y);
}

TEST(ExperimentTest, CsvHasOneLinePerCell) {
  const RuleClassifier model = RuleClassifier::cadenceLike();
  const auto table = runExperiment(model, somePieces(1, 8, 4),
                                   {cell("c1", 1, ExplainMode::kGreedy),
                                    cell("c2", 0, ExplainMode::kGreedy)},
                                   {.repeats = 1});
  const std::string csv = experimentTableCsv(table);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);  // header + 2 cells
  EXPECT_NE(csv.find("c1,"), std::string::npos);
  EXPECT_NE(csv.find("c2,"), std::string::npos);
}

TEST(ExperimentTest, AutoTargetPrefersNodesNeedingAFlip) {
  const RuleClassifier model = RuleClassifier::pitchClassIs(0);
  Rng rng(5);
  const ScoreGraph piece = synthPiece(10, rng, "p");
  const std::string target = autoTargetNode(model, piece, 1);
  const auto preds = model.classify(piece);
  const auto& dist = preds.at(target);
  EXPECT_LT(dist[1], dist[0]);  // currently predicted NC, so a flip is needed
}

TEST(ExperimentTest, RejectsEmptyInputs) {
  const RuleClassifier model = RuleClassifier::cadenceLike();
  EXPECT_THROW(runExperiment(model, {}, {cell("x", 1, ExplainMode::kGreedy)}, {}),
               ValidationError);
  EXPECT_THROW(runExperiment(model, somePieces(1, 6, 6), {}, {}), ValidationError);
}

}  // namespace
}  // namespace scorecf
