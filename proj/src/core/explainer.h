#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/distance.h"
#include "core/edits.h"
#include "core/model.h"
#include "core/policy.h"
#include "core/score_graph.h"

namespace scorecf {

enum class ExplainMode { kGreedy, kLearned };

const char* explainModeName(ExplainMode mode);
std::optional<ExplainMode> explainModeFromName(const std::string& name);

struct ExplainConfig {
  int n = 10;  // explanations to produce, each extending the previous
  int t = 50;  // inner training steps per explanation
  std::string target_node;
  int target_label = 0;
  LossConfig loss;
  ExplainMode mode = ExplainMode::kGreedy;
  std::optional<std::set<EditOpType>> allowed_ops;
  std::vector<EditOpType> op_path;  // prescribed op per step; empty = free
  double policy_learning_rate = 1.0;
  int pitch_window = 12;
  int max_candidates = 4096;
  std::uint64_t seed = 0;
  std::optional<double> time_budget_seconds;
};

struct ExplanationResult {
  int step_index = 0;  // 1-based; step 0 is the original
  ScoreGraph graph;
  EditLog log;  // cumulative from the original
  std::vector<double> prediction;
  bool valid = false;  // argmax(prediction) == target_label
  LossBreakdown loss;
  double wall_time_seconds = 0.0;
};

struct ExplanationSummary {
  std::optional<int> first_valid_step;  // 0 = the original already matches
  std::optional<EditOpType> dominant_op;
  int total_ops = 0;
  double total_time_seconds = 0.0;
  bool truncated = false;
  std::string truncation_reason;
};

struct ExplanationSequence {
  ScoreGraph original;
  std::vector<double> original_prediction;
  bool original_valid = false;
  std::vector<ExplanationResult> results;
  ExplanationSummary summary;
  ExplainConfig config;
  std::vector<std::string> label_names;
};

struct CandidateEvaluation {
  EditOp op;
  LossBreakdown loss;
  std::size_t delta_size = 0;
};

struct GreedyStep {
  std::size_t best_index = 0;
  std::vector<CandidateEvaluation> table;  // in candidate enumeration order
};

// Exhaustive single-step search: evaluates the loss of every one-edit
// extension of `current` and returns the minimizer (ties: fewer edge changes,
// then canonical op order). Throws SearchError when no candidate is legal.
GreedyStep innerStepGreedy(const NodeClassifier& model, const ScoreGraph& original,
                           const ScoreGraph& current, const EditLog& cumulative_log,
                           const ExplainConfig& config,
                           const std::optional<EditOpType>& prescribed,
                           std::uint64_t candidate_seed);

// One policy training iteration: sample a candidate, evaluate the loss of the
// one-edit extension, take a score-function gradient step against the running
// baseline. Returns the sampled loss.
double innerStepLearned(InnerPolicy& policy, const PolicyContext& ctx,
                        const PreparedCandidates& batch, const NodeClassifier& model,
                        const ScoreGraph& original, const ScoreGraph& current,
                        const EditLog& cumulative_log, const ExplainConfig& config,
                        Rng& rng, double& baseline_mean, std::size_t& baseline_count);

// Iterative production of config.n counterfactuals, each built on the last.
ExplanationSequence explain(const NodeClassifier& model, const ScoreGraph& original,
                            const ExplainConfig& config);

struct ScoreReport {
  bool flip = false;
  double nd_term = 0.0;
  double gp_term = 0.0;
  int num_ops = 0;
  std::map<EditOpType, int> op_histogram;
};

ScoreReport scoreExplanation(const ExplanationResult& result, const ScoreGraph& original);

// Candidate options an explanation round uses (target removal excluded).
CandidateOptions candidateOptionsFor(const ExplainConfig& config,
                                     const std::optional<EditOpType>& prescribed,
                                     std::uint64_t candidate_seed);

}  // namespace scorecf
