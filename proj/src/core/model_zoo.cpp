#include "core/model_zoo.h"

#include <charconv>
#include <map>
#include <vector>

#include "core/errors.h"
#include "core/synth.h"

namespace scorecf {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parseIntOption(const std::string& value, const std::string& key) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("model option '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

std::map<std::string, std::string> parseOptions(const std::string& text) {
  std::map<std::string, std::string> options;
  if (text.empty()) return options;
  for (const std::string& kv : split(text, ',')) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("model option '" + kv + "' is not key=value");
    }
    options[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return options;
}

GnnConfig gnnConfigFrom(const std::map<std::string, std::string>& options) {
  GnnConfig config;
  for (const auto& [key, value] : options) {
    if (key == "layers") {
      config.layers = static_cast<int>(parseIntOption(value, key));
    } else if (key == "hidden") {
      config.hidden_width = static_cast<int>(parseIntOption(value, key));
    } else if (key == "classes") {
      config.num_classes = static_cast<int>(parseIntOption(value, key));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parseIntOption(value, key));
    } else if (key != "pieces" && key != "notes" && key != "epochs" && key != "lr") {
      throw ValidationError("unknown model option '" + key + "'");
    }
  }
  return config;
}

}  // namespace

std::unique_ptr<NodeClassifier> createBuiltinModel(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  const std::string& head = parts[0];

  if (head == "const") {
    if (parts.size() != 2) throw ValidationError("const model needs a class index");
    const int index = static_cast<int>(parseIntOption(parts[1], "class index"));
    if (index < 0 || index > 1) throw ValidationError("const class index must be 0 or 1");
    std::vector<double> dist{0.0, 0.0};
    dist[static_cast<std::size_t>(index)] = 1.0;
    return std::make_unique<ConstantClassifier>(std::move(dist),
                                                std::vector<std::string>{"NC", "PAC"});
  }
  if (head == "rule") {
    if (parts.size() < 2) throw ValidationError("rule model needs a rule name");
    const std::string& rule = parts[1];
    if (rule == "pitch_class") {
      if (parts.size() != 3) throw ValidationError("rule:pitch_class needs a pitch class");
      return std::make_unique<RuleClassifier>(RuleClassifier::pitchClassIs(
          static_cast<int>(parseIntOption(parts[2], "pitch class"))));
    }
    if (rule == "onset_peer") {
      if (parts.size() != 3) throw ValidationError("rule:onset_peer needs a pitch class");
      return std::make_unique<RuleClassifier>(RuleClassifier::onsetPeerPitchClass(
          static_cast<int>(parseIntOption(parts[2], "pitch class"))));
    }
    if (rule == "cadence") {
      return std::make_unique<RuleClassifier>(RuleClassifier::cadenceLike());
    }
    throw ValidationError("unknown rule '" + rule + "'");
  }
  if (head == "gnn" || head == "gnn_trained") {
    const auto options = parseOptions(parts.size() > 1 ? spec.substr(head.size() + 1) : "");
    auto model = std::make_unique<ReferenceGnn>(gnnConfigFrom(options));
    if (head == "gnn") return model;

    SynthOptions synth;
    synth.num_pieces = 40;
    synth.notes_per_piece = 24;
    synth.seed = model->config().seed;
    int epochs = 150;
    double lr = 0.5;
    for (const auto& [key, value] : options) {
      if (key == "pieces") synth.num_pieces = static_cast<int>(parseIntOption(value, key));
      if (key == "notes") synth.notes_per_piece = static_cast<int>(parseIntOption(value, key));
      if (key == "epochs") epochs = static_cast<int>(parseIntOption(value, key));
      if (key == "lr") lr = std::stod(value);
    }
    const auto dataset = synthDataset(synth, RuleClassifier::cadenceLike());
    TrainResult trained = trainReference(*model, dataset, epochs, lr);
    return std::make_unique<ReferenceGnn>(std::move(trained.model));
  }
  throw ValidationError("unknown builtin model '" + spec + "'");
}

}  // namespace scorecf
