#include "core/model.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/errors.h"
#include "core/features.h"
#include "core/rng.h"

namespace scorecf {

int NodeClassifier::labelIndex(const std::string& name) const {
  const auto& names = labelNames();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

ConstantClassifier::ConstantClassifier(std::vector<double> distribution,
                                       std::vector<std::string> label_names)
    : distribution_(std::move(distribution)), label_names_(std::move(label_names)) {
  if (distribution_.size() < 2 || distribution_.size() != label_names_.size()) {
    throw ValidationError("constant classifier needs matching distribution and label names");
  }
  double sum = 0.0;
  for (const double p : distribution_) {
    if (p < 0.0) throw ValidationError("constant distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("constant distribution does not sum to 1");
  }
}

std::map<std::string, std::vector<double>> ConstantClassifier::classify(
    const ScoreGraph& graph) const {
  std::map<std::string, std::vector<double>> out;
  for (const Note& n : graph.notes()) {
    if (!n.removed) out.emplace(n.id, distribution_);
  }
  return out;
}

RuleClassifier::RuleClassifier(Kind kind, int pitch_class, double margin,
                               std::vector<std::string> label_names)
    : kind_(kind), pitch_class_(pitch_class), margin_(margin),
      label_names_(std::move(label_names)) {
  if (pitch_class_ < 0 || pitch_class_ > 11) {
    throw ValidationError("rule pitch class outside [0,11]");
  }
}

RuleClassifier RuleClassifier::pitchClassIs(int pc, double margin) {
  return RuleClassifier(Kind::kPitchClassIs, pc, margin);
}
RuleClassifier RuleClassifier::onsetPeerPitchClass(int pc, double margin) {
  return RuleClassifier(Kind::kOnsetPeerPitchClass, pc, margin);
}
RuleClassifier RuleClassifier::cadenceLike(double margin) {
  return RuleClassifier(Kind::kCadenceLike, 0, margin);
}

bool RuleClassifier::predicate(const ScoreGraph& graph, const Note& note) const {
  switch (kind_) {
    case Kind::kPitchClassIs:
      return note.pitchClass() == pitch_class_;
    case Kind::kOnsetPeerPitchClass:
      for (const Note& v : graph.notes()) {
        if (!v.removed && v.id != note.id && v.onset == note.onset &&
            v.pitchClass() == pitch_class_) {
          return true;
        }
      }
      return false;
    case Kind::kCadenceLike: {
      const int pc = note.pitchClass();
      if (pc != 0 && pc != 7) return false;
      for (const Note& v : graph.notes()) {
        if (!v.removed && v.id != note.id && v.onset == note.onset) return true;
      }
      return false;
    }
  }
  return false;
}

std::map<std::string, std::vector<double>> RuleClassifier::classify(
    const ScoreGraph& graph) const {
  std::map<std::string, std::vector<double>> out;
  for (const Note& n : graph.notes()) {
    if (n.removed) continue;
    const double score = predicate(graph, n) ? margin_ : -margin_;
    const double positive = 1.0 / (1.0 + std::exp(-score));
    out.emplace(n.id, std::vector<double>{1.0 - positive, positive});
  }
  return out;
}

namespace {

constexpr int kRelationCount = 6;  // one message transform per edge type

std::size_t layerInputWidth(const GnnConfig& c, int layer) {
  return static_cast<std::size_t>(layer == 0 ? c.input_width : c.hidden_width);
}

std::size_t readoutInputWidth(const GnnConfig& c) {
  return static_cast<std::size_t>(c.layers > 0 ? c.hidden_width : c.input_width);
}

std::size_t layerParamCount(const GnnConfig& c, int layer) {
  const std::size_t in = layerInputWidth(c, layer);
  const std::size_t h = static_cast<std::size_t>(c.hidden_width);
  return h * in * (1 + kRelationCount) + h;  // self + relations + bias
}

std::size_t totalParamCount(const GnnConfig& c) {
  std::size_t n = 0;
  for (int l = 0; l < c.layers; ++l) n += layerParamCount(c, l);
  n += static_cast<std::size_t>(c.num_classes) * readoutInputWidth(c) +
       static_cast<std::size_t>(c.num_classes);
  return n;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

ReferenceGnn::ReferenceGnn(GnnConfig config) : config_(std::move(config)) {
  if (config_.input_width <= 0) config_.input_width = kFeatureWidth;
  if (config_.hidden_width <= 0 || config_.layers < 0 || config_.num_classes < 2) {
    throw ValidationError("invalid reference model configuration");
  }
  if (config_.label_names.size() != static_cast<std::size_t>(config_.num_classes)) {
    config_.label_names.clear();
    for (int c = 0; c < config_.num_classes; ++c) {
      config_.label_names.push_back("class_" + std::to_string(c));
    }
  }
  params_.assign(totalParamCount(config_), 0.0);
  Rng rng(config_.seed);
  std::size_t offset = 0;
  for (int l = 0; l < config_.layers; ++l) {
    const std::size_t in = layerInputWidth(config_, l);
    const std::size_t h = static_cast<std::size_t>(config_.hidden_width);
    const double scale = std::sqrt(6.0 / static_cast<double>(in + h));
    const std::size_t weights = h * in * (1 + kRelationCount);
    for (std::size_t i = 0; i < weights; ++i) {
      params_[offset + i] = rng.uniformReal(-scale, scale);
    }
    offset += weights + h;  // biases stay zero
  }
  const std::size_t rin = readoutInputWidth(config_);
  const double scale = std::sqrt(6.0 / static_cast<double>(rin + config_.num_classes));
  for (std::size_t i = 0; i < static_cast<std::size_t>(config_.num_classes) * rin; ++i) {
    params_[offset + i] = rng.uniformReal(-scale, scale);
  }
}

std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
ReferenceGnn::parameterGroups() const {
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> groups;
  std::size_t offset = 0;
  for (int l = 0; l < config_.layers; ++l) {
    const std::size_t in = layerInputWidth(config_, l);
    const std::size_t h = static_cast<std::size_t>(config_.hidden_width);
    const std::string prefix = "layer" + std::to_string(l) + ".";
    groups.push_back({prefix + "self", {offset, offset + h * in}});
    offset += h * in;
    for (int r = 0; r < kRelationCount; ++r) {
      groups.push_back({prefix + "rel_" + edgeTypeName(static_cast<EdgeType>(r)),
                        {offset, offset + h * in}});
      offset += h * in;
    }
    groups.push_back({prefix + "bias", {offset, offset + h}});
    offset += h;
  }
  const std::size_t rin = readoutInputWidth(config_);
  const std::size_t c = static_cast<std::size_t>(config_.num_classes);
  groups.push_back({"readout.weight", {offset, offset + c * rin}});
  offset += c * rin;
  groups.push_back({"readout.bias", {offset, offset + c}});
  return groups;
}

// Shared forward/backward machinery over one graph.
class GnnAutodiff {
 public:
  GnnAutodiff(const ReferenceGnn& model, const ScoreGraph& graph)
      : model_(model), config_(model.config()) {
    for (const Note& n : graph.notes()) {
      if (!n.removed) ids_.push_back(n.id);
    }
    if (graph.hierarchy()) {
      for (const auto& h : graph.hierarchy()->beats) ids_.push_back(h.id);
      for (const auto& h : graph.hierarchy()->measures) ids_.push_back(h.id);
    }
    std::sort(ids_.begin(), ids_.end());
    for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = i;

    const std::size_t n = ids_.size();
    features_.assign(n, std::vector<double>(static_cast<std::size_t>(config_.input_width), 0.0));
    note_node_.assign(n, false);
    for (const Note& note : graph.notes()) {
      if (note.removed) continue;
      const std::size_t i = index_.at(note.id);
      std::vector<double> f = noteFeatures(note);
      if (f.size() != static_cast<std::size_t>(config_.input_width)) {
        throw ValidationError("feature width does not match the model input width");
      }
      features_[i] = std::move(f);
      note_node_[i] = true;
    }

    in_neighbors_.assign(n * kRelationCount, {});
    for (const Edge& e : graph.edges()) {
      const auto src = index_.find(e.src);
      const auto dst = index_.find(e.dst);
      if (src == index_.end() || dst == index_.end()) continue;
      in_neighbors_[dst->second * kRelationCount + static_cast<std::size_t>(e.type)].push_back(
          src->second);
    }
  }

  // Hidden states per layer; caches pre-activations for the backward pass.
  void forward() {
    h_.clear();
    z_.clear();
    h_.push_back(features_);
    const std::size_t n = ids_.size();
    for (int l = 0; l < config_.layers; ++l) {
      const std::size_t in = layerInputWidth(config_, l);
      const std::size_t hw = static_cast<std::size_t>(config_.hidden_width);
      const double* base = model_.parameters().data() + layerOffset(l);
      const double* w_self = base;
      const double* bias = base + hw * in * (1 + kRelationCount);
      std::vector<std::vector<double>> z(n, std::vector<double>(hw, 0.0));
      std::vector<std::vector<double>> h(n, std::vector<double>(hw, 0.0));
      for (std::size_t v = 0; v < n; ++v) {
        const std::vector<double>& x = h_.back()[v];
        for (std::size_t k = 0; k < hw; ++k) {
          double acc = bias[k];
          const double* row = w_self + k * in;
          for (std::size_t j = 0; j < in; ++j) acc += row[j] * x[j];
          z[v][k] = acc;
        }
        for (int r = 0; r < kRelationCount; ++r) {
          const auto& nbrs = in_neighbors_[v * kRelationCount + static_cast<std::size_t>(r)];
          if (nbrs.empty()) continue;
          std::vector<double> mean(in, 0.0);
          for (const std::size_t u : nbrs) {
            const std::vector<double>& xu = h_.back()[u];
            for (std::size_t j = 0; j < in; ++j) mean[j] += xu[j];
          }
          const double inv = 1.0 / static_cast<double>(nbrs.size());
          for (std::size_t j = 0; j < in; ++j) mean[j] *= inv;
          const double* w_rel = base + hw * in * (1 + static_cast<std::size_t>(r));
          for (std::size_t k = 0; k < hw; ++k) {
            double acc = 0.0;
            const double* row = w_rel + k * in;
            for (std::size_t j = 0; j < in; ++j) acc += row[j] * mean[j];
            z[v][k] += acc;
          }
        }
        for (std::size_t k = 0; k < hw; ++k) h[v][k] = std::tanh(z[v][k]);
      }
      z_.push_back(std::move(z));
      h_.push_back(std::move(h));
    }
  }

  std::vector<double> logitsFor(std::size_t v) const {
    const std::size_t rin = readoutInputWidth(config_);
    const std::size_t c = static_cast<std::size_t>(config_.num_classes);
    const double* w = model_.parameters().data() + readoutOffset();
    const double* b = w + c * rin;
    const std::vector<double>& x = h_.back()[v];
    std::vector<double> logits(c, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      double acc = b[k];
      const double* row = w + k * rin;
      for (std::size_t j = 0; j < rin; ++j) acc += row[j] * x[j];
      logits[k] = acc;
    }
    return logits;
  }

  std::map<std::string, std::vector<double>> predictions() const {
    std::map<std::string, std::vector<double>> out;
    for (std::size_t v = 0; v < ids_.size(); ++v) {
      if (!note_node_[v]) continue;
      out.emplace(ids_[v], softmax(logitsFor(v)));
    }
    return out;
  }

  // Adds d(mean CE over the labels)/d(params) into grad; returns the summed
  // cross-entropy and the number of labeled notes it covers.
  std::pair<double, std::size_t> backward(const std::map<std::string, int>& labels,
                                          std::vector<double>& grad) {
    const std::size_t n = ids_.size();
    const std::size_t rin = readoutInputWidth(config_);
    const std::size_t c = static_cast<std::size_t>(config_.num_classes);

    double ce_sum = 0.0;
    std::size_t labeled = 0;
    std::vector<std::vector<double>> dh(n, std::vector<double>(rin, 0.0));
    const double* w_out = model_.parameters().data() + readoutOffset();
    double* gw_out = grad.data() + readoutOffset();
    double* gb_out = gw_out + c * rin;

    for (std::size_t v = 0; v < n; ++v) {
      if (!note_node_[v]) continue;
      const auto it = labels.find(ids_[v]);
      if (it == labels.end()) continue;
      const int y = it->second;
      if (y < 0 || y >= config_.num_classes) {
        throw ValidationError("label outside [0, num_classes) for note '" + ids_[v] + "'");
      }
      ++labeled;
      const std::vector<double> p = softmax(logitsFor(v));
      ce_sum += -std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
      for (std::size_t k = 0; k < c; ++k) {
        const double dlogit = p[k] - (static_cast<int>(k) == y ? 1.0 : 0.0);
        gb_out[k] += dlogit;
        const std::vector<double>& x = h_.back()[v];
        double* row = gw_out + k * rin;
        for (std::size_t j = 0; j < rin; ++j) row[j] += dlogit * x[j];
        const double* wrow = w_out + k * rin;
        for (std::size_t j = 0; j < rin; ++j) dh[v][j] += dlogit * wrow[j];
      }
    }

    for (int l = config_.layers - 1; l >= 0; --l) {
      const std::size_t in = layerInputWidth(config_, l);
      const std::size_t hw = static_cast<std::size_t>(config_.hidden_width);
      const double* base = model_.parameters().data() + layerOffset(l);
      double* gbase = grad.data() + layerOffset(l);
      std::vector<std::vector<double>> dx(n, std::vector<double>(in, 0.0));
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> dz(hw);
        bool nonzero = false;
        for (std::size_t k = 0; k < hw; ++k) {
          const double t = std::tanh(z_[static_cast<std::size_t>(l)][v][k]);
          dz[k] = dh[v][k] * (1.0 - t * t);
          nonzero = nonzero || dz[k] != 0.0;
        }
        if (!nonzero) continue;
        const std::vector<double>& x = h_[static_cast<std::size_t>(l)][v];
        double* gw_self = gbase;
        double* gbias = gbase + hw * in * (1 + kRelationCount);
        for (std::size_t k = 0; k < hw; ++k) {
          gbias[k] += dz[k];
          double* row = gw_self + k * in;
          for (std::size_t j = 0; j < in; ++j) row[j] += dz[k] * x[j];
          const double* wrow = base + k * in;
          for (std::size_t j = 0; j < in; ++j) dx[v][j] += dz[k] * wrow[j];
        }
        for (int r = 0; r < kRelationCount; ++r) {
          const auto& nbrs = in_neighbors_[v * kRelationCount + static_cast<std::size_t>(r)];
          if (nbrs.empty()) continue;
          const double inv = 1.0 / static_cast<double>(nbrs.size());
          std::vector<double> mean(in, 0.0);
          for (const std::size_t u : nbrs) {
            const std::vector<double>& xu = h_[static_cast<std::size_t>(l)][u];
            for (std::size_t j = 0; j < in; ++j) mean[j] += xu[j];
          }
          for (std::size_t j = 0; j < in; ++j) mean[j] *= inv;
          const double* w_rel = base + hw * in * (1 + static_cast<std::size_t>(r));
          double* gw_rel = gbase + hw * in * (1 + static_cast<std::size_t>(r));
          std::vector<double> dmean(in, 0.0);
          for (std::size_t k = 0; k < hw; ++k) {
            double* row = gw_rel + k * in;
            for (std::size_t j = 0; j < in; ++j) row[j] += dz[k] * mean[j];
            const double* wrow = w_rel + k * in;
            for (std::size_t j = 0; j < in; ++j) dmean[j] += dz[k] * wrow[j];
          }
          for (const std::size_t u : nbrs) {
            for (std::size_t j = 0; j < in; ++j) dx[u][j] += dmean[j] * inv;
          }
        }
      }
      dh = std::move(dx);
    }
    return {ce_sum, labeled};
  }

 private:
  std::size_t layerOffset(int layer) const {
    std::size_t offset = 0;
    for (int l = 0; l < layer; ++l) offset += layerParamCount(config_, l);
    return offset;
  }
  std::size_t readoutOffset() const { return layerOffset(config_.layers); }

  const ReferenceGnn& model_;
  const GnnConfig& config_;
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> features_;
  std::vector<bool> note_node_;
  std::vector<std::vector<std::size_t>> in_neighbors_;  // [node * relation]
  std::vector<std::vector<std::vector<double>>> h_;     // per layer, per node
  std::vector<std::vector<std::vector<double>>> z_;
};

std::map<std::string, std::vector<double>> ReferenceGnn::classify(const ScoreGraph& graph) const {
  GnnAutodiff ad(*this, graph);
  ad.forward();
  return ad.predictions();
}

double datasetLoss(const ReferenceGnn& model, const std::vector<LabeledGraph>& dataset) {
  double ce_sum = 0.0;
  std::size_t count = 0;
  std::vector<double> scratch(model.parameters().size(), 0.0);
  for (const auto& [graph, labels] : dataset) {
    GnnAutodiff ad(model, graph);
    ad.forward();
    const auto [ce, labeled] = ad.backward(labels, scratch);
    ce_sum += ce;
    count += labeled;
  }
  if (count == 0) throw ValidationError("dataset has no labeled notes");
  return ce_sum / static_cast<double>(count);
}

std::vector<double> datasetGradient(const ReferenceGnn& model,
                                    const std::vector<LabeledGraph>& dataset) {
  std::vector<double> grad(model.parameters().size(), 0.0);
  std::size_t count = 0;
  for (const auto& [graph, labels] : dataset) {
    GnnAutodiff ad(model, graph);
    ad.forward();
    count += ad.backward(labels, grad).second;
  }
  if (count == 0) throw ValidationError("dataset has no labeled notes");
  const double inv = 1.0 / static_cast<double>(count);
  for (double& g : grad) g *= inv;
  return grad;
}

TrainResult trainReference(const ReferenceGnn& model, const std::vector<LabeledGraph>& dataset,
                           int epochs, double learning_rate) {
  if (dataset.empty()) throw ValidationError("empty training dataset");
  if (epochs < 0) throw ValidationError("negative epoch count");
  TrainResult result{model, {}};
  result.epoch_losses.reserve(static_cast<std::size_t>(epochs));
  for (int e = 0; e < epochs; ++e) {
    const std::vector<double> grad = datasetGradient(result.model, dataset);
    std::vector<double>& p = result.model.mutableParameters();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * grad[i];
    result.epoch_losses.push_back(datasetLoss(result.model, dataset));
  }
  return result;
}

double datasetAccuracy(const NodeClassifier& model, const std::vector<LabeledGraph>& dataset) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& [graph, labels] : dataset) {
    const auto preds = model.classify(graph);
    for (const auto& [id, label] : labels) {
      const auto it = preds.find(id);
      if (it == preds.end()) continue;
      const auto& p = it->second;
      const int argmax = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      correct += (argmax == label) ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

using nlohmann::json;

nlohmann::json ReferenceGnn::toCheckpointJson() const {
  json j;
  j["format"] = "scorecf-gnn";
  j["version"] = 1;
  j["input_width"] = config_.input_width;
  j["hidden_width"] = config_.hidden_width;
  j["layers"] = config_.layers;
  j["num_classes"] = config_.num_classes;
  j["label_names"] = config_.label_names;
  j["seed"] = config_.seed;
  j["feature_layout"] = featureLayoutId();
  json weights = json::array();
  char buf[40];
  for (const double v : params_) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    weights.push_back(std::string(buf));
  }
  j["weights"] = std::move(weights);
  return j;
}

ReferenceGnn ReferenceGnn::fromCheckpointJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "scorecf-gnn") {
      throw ParseError("not a model checkpoint");
    }
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported checkpoint version");
    GnnConfig config;
    config.input_width = j.at("input_width").get<int>();
    config.hidden_width = j.at("hidden_width").get<int>();
    config.layers = j.at("layers").get<int>();
    config.num_classes = j.at("num_classes").get<int>();
    config.label_names = j.at("label_names").get<std::vector<std::string>>();
    config.seed = j.at("seed").get<std::uint64_t>();
    ReferenceGnn model(config);
    const json& weights = j.at("weights");
    if (weights.size() != model.params_.size()) {
      throw ParseError("checkpoint weight count does not match the configuration");
    }
    for (std::size_t i = 0; i < model.params_.size(); ++i) {
      model.params_[i] = std::stod(weights[i].get<std::string>());
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model checkpoint: ") + e.what());
  }
}

}  // namespace scorecf
