#include "core/distance.h"

#include <cmath>

#include "core/errors.h"
#include "core/features.h"

namespace scorecf {

namespace {

double l1Norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (const double x : v) sum += std::abs(x);
  return sum;
}

}  // namespace

double nodeDistance(const ScoreGraph& cf, const ScoreGraph& original) {
  if (cf.metadata().feature_layout != original.metadata().feature_layout) {
    throw ValidationError("graphs use different feature layouts");
  }
  double total = 0.0;
  for (const Note& n : original.notes()) {
    if (n.removed) continue;
    const Note* other = cf.findNote(n.id);
    if (other && !other->removed) {
      const std::vector<double> a = noteFeatures(n);
      const std::vector<double> b = noteFeatures(*other);
      for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    } else {
      total += l1Norm(noteFeatures(n));  // removed relative to the original
    }
  }
  for (const Note& n : cf.notes()) {
    if (n.removed) continue;
    const Note* other = original.findNote(n.id);
    if (!other || other->removed) total += l1Norm(noteFeatures(n));  // added
  }
  return total;
}

double graphDistance(const EditLog& log) {
  const EditDelta net = composeDeltas(log);
  return static_cast<double>(net.size());
}

double crossEntropy(const std::vector<double>& prediction, int target) {
  if (target < 0 || target >= static_cast<int>(prediction.size())) {
    throw ValidationError("target class outside the prediction vector");
  }
  double sum = 0.0;
  for (const double p : prediction) {
    if (p < 0.0) throw ValidationError("prediction has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("prediction does not sum to 1");
  }
  return -std::log(std::max(prediction[static_cast<std::size_t>(target)], 1e-12));
}

LossBreakdown combineLoss(double entropy_term, double nd_term, double gp_term,
                          const LossConfig& config) {
  LossBreakdown b;
  b.entropy_term = entropy_term;
  b.nd_term = nd_term;
  b.gp_term = gp_term;
  b.total = config.lambda * entropy_term + config.lambda_nd * nd_term + config.lambda_gp * gp_term;
  return b;
}

LossBreakdown computeLoss(const ScoreGraph& cf, const ScoreGraph& original, const EditLog& log,
                          const std::string& target_node, int target_label,
                          const NodeClassifier& model, const LossConfig& config) {
  const Note* target = cf.findNote(target_node);
  if (!target) throw ValidationError("target node '" + target_node + "' not in the graph");
  if (target->removed) {
    throw ValidationError("target node '" + target_node + "' was removed by an edit");
  }
  if (target_label < 0 || target_label >= model.numClasses()) {
    throw ValidationError("target label outside [0, num_classes)");
  }
  const auto predictions = model.classify(cf);
  const auto it = predictions.find(target_node);
  if (it == predictions.end()) {
    throw ValidationError("model produced no prediction for the target node");
  }
  return combineLoss(crossEntropy(it->second, target_label), nodeDistance(cf, original),
                     graphDistance(log), config);
}

}  // namespace scorecf
