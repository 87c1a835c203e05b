#pragma once

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core/score_graph.h"

namespace scorecf {

// Black-box node classifier: graph in, one class distribution per non-removed
// note out. Distributions are nonnegative, sum to 1 within 1e-9, and are
// deterministic for a fixed graph.
class NodeClassifier {
 public:
  virtual ~NodeClassifier() = default;

  virtual int numClasses() const = 0;
  virtual const std::vector<std::string>& labelNames() const = 0;
  virtual std::map<std::string, std::vector<double>> classify(const ScoreGraph& graph) const = 0;

  // Index for a label name; -1 when unknown.
  int labelIndex(const std::string& name) const;
};

// Emits the same fixed distribution for every note.
class ConstantClassifier : public NodeClassifier {
 public:
  ConstantClassifier(std::vector<double> distribution, std::vector<std::string> label_names);

  int numClasses() const override { return static_cast<int>(distribution_.size()); }
  const std::vector<std::string>& labelNames() const override { return label_names_; }
  std::map<std::string, std::vector<double>> classify(const ScoreGraph& graph) const override;

 private:
  std::vector<double> distribution_;
  std::vector<std::string> label_names_;
};

// Transparent two-class predicate model with margin-based confidence:
// p(positive) = sigmoid(margin) when the predicate holds, sigmoid(-margin)
// otherwise. The positive class is index 1.
class RuleClassifier : public NodeClassifier {
 public:
  enum class Kind {
    kPitchClassIs,       // the note's own pitch class equals pc
    kOnsetPeerPitchClass,  // another active note shares the onset and has pitch class pc
    kCadenceLike,        // pitch class in {0,7} with at least one same-onset peer
  };

  RuleClassifier(Kind kind, int pitch_class, double margin = 2.0,
                 std::vector<std::string> label_names = {"NC", "PAC"});

  static RuleClassifier pitchClassIs(int pc, double margin = 2.0);
  static RuleClassifier onsetPeerPitchClass(int pc, double margin = 2.0);
  static RuleClassifier cadenceLike(double margin = 2.0);

  bool predicate(const ScoreGraph& graph, const Note& note) const;

  int numClasses() const override { return 2; }
  const std::vector<std::string>& labelNames() const override { return label_names_; }
  std::map<std::string, std::vector<double>> classify(const ScoreGraph& graph) const override;

  Kind kind() const { return kind_; }
  int pitchClass() const { return pitch_class_; }
  double margin() const { return margin_; }

 private:
  Kind kind_;
  int pitch_class_;
  double margin_;
  std::vector<std::string> label_names_;
};

struct GnnConfig {
  int input_width = 0;   // defaults to the note feature width
  int hidden_width = 16;
  int layers = 2;        // 0 = readout directly on the input features
  int num_classes = 2;
  std::vector<std::string> label_names = {"NC", "PAC"};
  std::uint64_t seed = 7;
};

// Small heterogeneous message-passing network: per-edge-type linear messages,
// mean aggregation per type summed across types, tanh, L layers, linear
// readout with softmax. Forward and backward passes are explicit; hierarchy
// nodes carry a constant zero feature vector and removed notes are excluded.
class ReferenceGnn : public NodeClassifier {
 public:
  explicit ReferenceGnn(GnnConfig config);

  int numClasses() const override { return config_.num_classes; }
  const std::vector<std::string>& labelNames() const override { return config_.label_names; }
  std::map<std::string, std::vector<double>> classify(const ScoreGraph& graph) const override;

  const GnnConfig& config() const { return config_; }

  // Flat parameter vector; mutable access is for training and checkpoints.
  const std::vector<double>& parameters() const { return params_; }
  std::vector<double>& mutableParameters() { return params_; }

  // Contiguous [begin, end) slices of the flat vector, for per-group checks.
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> parameterGroups()
      const;

  nlohmann::json toCheckpointJson() const;
  static ReferenceGnn fromCheckpointJson(const nlohmann::json& j);

 private:
  GnnConfig config_;
  std::vector<double> params_;
};

using LabeledGraph = std::pair<ScoreGraph, std::map<std::string, int>>;

// Mean cross-entropy of the model over every labeled note in the dataset.
double datasetLoss(const ReferenceGnn& model, const std::vector<LabeledGraph>& dataset);

// Analytic gradient of datasetLoss with respect to the flat parameter vector.
std::vector<double> datasetGradient(const ReferenceGnn& model,
                                    const std::vector<LabeledGraph>& dataset);

struct TrainResult {
  ReferenceGnn model;
  std::vector<double> epoch_losses;
};

// Full-batch gradient descent; deterministic for a fixed model seed.
TrainResult trainReference(const ReferenceGnn& model, const std::vector<LabeledGraph>& dataset,
                           int epochs, double learning_rate);

// Fraction of labeled notes whose argmax prediction matches the label.
double datasetAccuracy(const NodeClassifier& model, const std::vector<LabeledGraph>& dataset);

}  // namespace scorecf
