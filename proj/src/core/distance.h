#pragma once

#include <string>
#include <vector>

#include "core/edits.h"
#include "core/model.h"
#include "core/score_graph.h"

namespace scorecf {

// Balancing factors of the composite loss; defaults are the heavier
// "distance" weighting (lambda_nd = lambda_gp = 0.1, lambda = 2.0).
struct LossConfig {
  double lambda = 2.0;
  double lambda_nd = 0.1;
  double lambda_gp = 0.1;
};

struct LossBreakdown {
  double entropy_term = 0.0;
  double nd_term = 0.0;
  double gp_term = 0.0;
  double total = 0.0;
};

// Sum of L1 feature differences over note ids active in both graphs, plus the
// L1 feature mass of ids active in exactly one (added or removed notes).
// Hierarchy nodes carry no features and do not contribute.
double nodeDistance(const ScoreGraph& cf, const ScoreGraph& original);

// Net edit distance from the tracked log: composed deltas, so an edge added
// and later removed costs nothing.
double graphDistance(const EditLog& log);

// -log(prediction[target]) with a 1e-12 probability floor. The prediction
// must be a distribution (entries >= 0, sum within 1e-9 of 1).
double crossEntropy(const std::vector<double>& prediction, int target);

LossBreakdown combineLoss(double entropy_term, double nd_term, double gp_term,
                          const LossConfig& config);

// Full composite loss of a counterfactual: model entropy at the target node
// plus weighted distances. The target must be active in the counterfactual.
LossBreakdown computeLoss(const ScoreGraph& cf, const ScoreGraph& original, const EditLog& log,
                          const std::string& target_node, int target_label,
                          const NodeClassifier& model, const LossConfig& config);

}  // namespace scorecf
