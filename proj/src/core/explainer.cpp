#include "core/explainer.h"

#include <algorithm>
#include <chrono>

#include "core/errors.h"

namespace scorecf {

const char* explainModeName(ExplainMode mode) {
  return mode == ExplainMode::kGreedy ? "greedy" : "learned";
}

std::optional<ExplainMode> explainModeFromName(const std::string& name) {
  if (name == "greedy") return ExplainMode::kGreedy;
  if (name == "learned") return ExplainMode::kLearned;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(const Clock::time_point& start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int argmaxOf(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<double> predictionAt(const NodeClassifier& model, const ScoreGraph& graph,
                                 const std::string& target) {
  const auto preds = model.classify(graph);
  const auto it = preds.find(target);
  if (it == preds.end()) {
    throw ValidationError("model produced no prediction for node '" + target + "'");
  }
  return it->second;
}

LossBreakdown evaluateExtension(const NodeClassifier& model, const ScoreGraph& original,
                                const ScoreGraph& extended, const EditLog& extended_log,
                                const ExplainConfig& config) {
  const std::vector<double> pred = predictionAt(model, extended, config.target_node);
  return combineLoss(crossEntropy(pred, config.target_label), nodeDistance(extended, original),
                     graphDistance(extended_log), config.loss);
}

void validateConfig(const NodeClassifier& model, const ScoreGraph& original,
                    const ExplainConfig& config) {
  if (config.n < 1 || config.t < 1) throw ValidationError("n and t must be at least 1");
  const Note* target = original.findNote(config.target_node);
  if (!target) throw ValidationError("target node '" + config.target_node + "' not found");
  if (target->removed) throw ValidationError("target node is removed in the input graph");
  if (config.target_label < 0 || config.target_label >= model.numClasses()) {
    throw ValidationError("target label outside [0, num_classes)");
  }
  if (!config.op_path.empty() && config.op_path.size() != static_cast<std::size_t>(config.n)) {
    throw ValidationError("prescribed op path length must equal n");
  }
  if (config.policy_learning_rate < 0.0) {
    throw ValidationError("policy learning rate must be nonnegative");
  }
}

}  // namespace

CandidateOptions candidateOptionsFor(const ExplainConfig& config,
                                     const std::optional<EditOpType>& prescribed,
                                     std::uint64_t candidate_seed) {
  CandidateOptions options;
  if (prescribed) {
    options.allowed_ops = std::set<EditOpType>{*prescribed};
  } else {
    options.allowed_ops = config.allowed_ops;
  }
  options.pitch_window = config.pitch_window;
  options.max_candidates = config.max_candidates;
  options.seed = candidate_seed;
  options.exclude_remove_id = config.target_node;  // never delete the prediction site
  return options;
}

GreedyStep innerStepGreedy(const NodeClassifier& model, const ScoreGraph& original,
                           const ScoreGraph& current, const EditLog& cumulative_log,
                           const ExplainConfig& config,
                           const std::optional<EditOpType>& prescribed,
                           std::uint64_t candidate_seed) {
  const std::vector<EditOp> candidates =
      candidateEdits(current, candidateOptionsFor(config, prescribed, candidate_seed));
  if (candidates.empty()) throw SearchError("no legal candidates");

  GreedyStep step;
  step.table.reserve(candidates.size());
  for (const EditOp& op : candidates) {
    auto [extended, delta] = applyEdit(current, op);
    EditLog extended_log = cumulative_log;
    extended_log.push_back({op, delta});
    CandidateEvaluation eval;
    eval.op = op;
    eval.loss = evaluateExtension(model, original, extended, extended_log, config);
    eval.delta_size = delta.added_edges.size() + delta.removed_edges.size();
    step.table.push_back(std::move(eval));
  }
  step.best_index = 0;
  for (std::size_t i = 1; i < step.table.size(); ++i) {
    const CandidateEvaluation& a = step.table[i];
    const CandidateEvaluation& b = step.table[step.best_index];
    if (a.loss.total < b.loss.total ||
        (a.loss.total == b.loss.total && a.delta_size < b.delta_size)) {
      step.best_index = i;  // equal (loss, delta): keep the earlier, canonical op
    }
  }
  return step;
}

double innerStepLearned(InnerPolicy& policy, const PolicyContext& ctx,
                        const PreparedCandidates& batch, const NodeClassifier& model,
                        const ScoreGraph& original, const ScoreGraph& current,
                        const EditLog& cumulative_log, const ExplainConfig& config,
                        Rng& rng, double& baseline_mean, std::size_t& baseline_count) {
  if (batch.empty()) throw SearchError("no legal candidates");
  const std::vector<double> probs = InnerPolicy::softmaxOf(policy.scores(ctx, batch));
  const std::size_t sampled = policy.sample(probs, rng);

  auto [extended, delta] = applyEdit(current, batch.ops()[sampled]);
  EditLog extended_log = cumulative_log;
  extended_log.push_back({batch.ops()[sampled], delta});
  const double loss =
      evaluateExtension(model, original, extended, extended_log, config).total;

  const double advantage = baseline_count == 0 ? 0.0 : baseline_mean - loss;
  policy.update(ctx, batch, probs, sampled, advantage, config.policy_learning_rate);

  ++baseline_count;
  baseline_mean += (loss - baseline_mean) / static_cast<double>(baseline_count);
  return loss;
}

ExplanationSequence explain(const NodeClassifier& model, const ScoreGraph& original,
                            const ExplainConfig& config) {
  validateConfig(model, original, config);
  const auto run_start = Clock::now();

  ExplanationSequence seq;
  seq.original = original;
  seq.config = config;
  seq.label_names = model.labelNames();
  seq.original_prediction = predictionAt(model, original, config.target_node);
  seq.original_valid = argmaxOf(seq.original_prediction) == config.target_label;

  InnerPolicy policy(config.pitch_window);
  Rng rng(deriveSeed(config.seed, 0));
  double baseline_mean = 0.0;
  std::size_t baseline_count = 0;

  ScoreGraph current = original;
  EditLog log;

  for (int round = 1; round <= config.n; ++round) {
    if (config.time_budget_seconds && secondsSince(run_start) > *config.time_budget_seconds) {
      seq.summary.truncated = true;
      seq.summary.truncation_reason = "time budget exceeded";
      break;
    }
    const auto round_start = Clock::now();
    const std::optional<EditOpType> prescribed =
        config.op_path.empty() ? std::nullopt
                               : std::optional<EditOpType>(
                                     config.op_path[static_cast<std::size_t>(round - 1)]);
    const std::uint64_t candidate_seed = deriveSeed(config.seed, static_cast<std::uint64_t>(round));

    EditOp committed;
    try {
      if (config.mode == ExplainMode::kGreedy) {
        // The step search is deterministic and exhaustive, so one pass per
        // round stands in for the t inner iterations of the training loop.
        const GreedyStep step =
            innerStepGreedy(model, original, current, log, config, prescribed, candidate_seed);
        committed = step.table[step.best_index].op;
      } else {
        std::vector<EditOp> candidates = candidateEdits(
            current, candidateOptionsFor(config, prescribed, candidate_seed));
        if (candidates.empty()) throw SearchError("no legal candidates");
        const PolicyContext ctx(current);
        const PreparedCandidates batch(ctx, std::move(candidates), config.pitch_window);
        for (int i = 0; i < config.t; ++i) {
          innerStepLearned(policy, ctx, batch, model, original, current, log, config, rng,
                           baseline_mean, baseline_count);
        }
        committed = batch.ops()[policy.commitIndex(ctx, batch)];
      }
    } catch (const SearchError&) {
      seq.summary.truncated = true;
      seq.summary.truncation_reason = "no legal candidates";
      break;
    }

    auto [next, delta] = applyEdit(current, committed);
    log.push_back({committed, delta});
    current = std::move(next);

    ExplanationResult result;
    result.step_index = round;
    result.graph = current;
    result.log = log;
    result.prediction = predictionAt(model, current, config.target_node);
    result.valid = argmaxOf(result.prediction) == config.target_label;
    result.loss = combineLoss(crossEntropy(result.prediction, config.target_label),
                              nodeDistance(current, original), graphDistance(log), config.loss);
    result.wall_time_seconds = secondsSince(round_start);
    seq.results.push_back(std::move(result));
  }

  // Summary block.
  if (seq.original_valid) {
    seq.summary.first_valid_step = 0;
  } else {
    for (const ExplanationResult& r : seq.results) {
      if (r.valid) {
        seq.summary.first_valid_step = r.step_index;
        break;
      }
    }
  }
  std::map<EditOpType, int> histogram;
  for (const ExplanationResult& r : seq.results) {
    histogram[r.log.back().op.type] += 1;
  }
  if (!histogram.empty()) {
    auto best = histogram.begin();
    for (auto it = histogram.begin(); it != histogram.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    seq.summary.dominant_op = best->first;
  }
  seq.summary.total_ops = static_cast<int>(seq.results.size());
  seq.summary.total_time_seconds = secondsSince(run_start);
  return seq;
}

ScoreReport scoreExplanation(const ExplanationResult& result, const ScoreGraph& original) {
  ScoreReport report;
  report.flip = result.valid;
  report.nd_term = nodeDistance(result.graph, original);
  report.gp_term = graphDistance(result.log);
  report.num_ops = static_cast<int>(result.log.size());
  for (const EditLogEntry& entry : result.log) {
    report.op_histogram[entry.op.type] += 1;
  }
  return report;
}

}  // namespace scorecf
