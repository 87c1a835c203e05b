#include "core/report.h"

#include <nlohmann/json.hpp>

#include "core/errors.h"
#include "core/json_io.h"

namespace scorecf {

using nlohmann::json;

json explainConfigToJson(const ExplainConfig& config) {
  json j{{"n", config.n},
         {"t", config.t},
         {"target_node", config.target_node},
         {"target_label", config.target_label},
         {"mode", explainModeName(config.mode)},
         {"lambda", config.loss.lambda},
         {"lambda_nd", config.loss.lambda_nd},
         {"lambda_gp", config.loss.lambda_gp},
         {"policy_lr", config.policy_learning_rate},
         {"pitch_window", config.pitch_window},
         {"max_candidates", config.max_candidates},
         {"seed", config.seed}};
  if (config.allowed_ops) {
    json ops = json::array();
    for (const EditOpType t : *config.allowed_ops) ops.push_back(editOpTypeName(t));
    j["ops"] = std::move(ops);
  }
  if (!config.op_path.empty()) {
    json path = json::array();
    for (const EditOpType t : config.op_path) path.push_back(editOpTypeName(t));
    j["op_path"] = std::move(path);
  }
  if (config.time_budget_seconds) j["time_budget"] = *config.time_budget_seconds;
  return j;
}

ExplainConfig explainConfigFromJson(const json& j) {
  try {
    ExplainConfig c;
    c.n = j.value("n", c.n);
    c.t = j.value("t", c.t);
    c.target_node = j.value("target_node", c.target_node);
    c.target_label = j.value("target_label", c.target_label);
    if (j.contains("mode")) {
      const auto mode = explainModeFromName(j.at("mode").get<std::string>());
      if (!mode) throw ParseError("unknown mode '" + j.at("mode").get<std::string>() + "'");
      c.mode = *mode;
    }
    c.loss.lambda = j.value("lambda", c.loss.lambda);
    c.loss.lambda_nd = j.value("lambda_nd", c.loss.lambda_nd);
    c.loss.lambda_gp = j.value("lambda_gp", c.loss.lambda_gp);
    c.policy_learning_rate = j.value("policy_lr", c.policy_learning_rate);
    c.pitch_window = j.value("pitch_window", c.pitch_window);
    c.max_candidates = j.value("max_candidates", c.max_candidates);
    c.seed = j.value("seed", c.seed);
    if (j.contains("ops")) {
      std::set<EditOpType> ops;
      for (const json& name : j.at("ops")) {
        const auto t = editOpTypeFromName(name.get<std::string>());
        if (!t) throw ParseError("unknown op '" + name.get<std::string>() + "'");
        ops.insert(*t);
      }
      c.allowed_ops = std::move(ops);
    }
    if (j.contains("op_path")) {
      for (const json& name : j.at("op_path")) {
        const auto t = editOpTypeFromName(name.get<std::string>());
        if (!t) throw ParseError("unknown op '" + name.get<std::string>() + "'");
        c.op_path.push_back(*t);
      }
    }
    if (j.contains("time_budget")) c.time_budget_seconds = j.at("time_budget").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("explain config: ") + e.what());
  }
}

json lossBreakdownToJson(const LossBreakdown& loss) {
  return json{{"entropy_term", loss.entropy_term},
              {"nd_term", loss.nd_term},
              {"gp_term", loss.gp_term},
              {"total", loss.total}};
}

json scoreReportToJson(const ScoreReport& report) {
  json histogram = json::object();
  for (const auto& [type, count] : report.op_histogram) {
    histogram[editOpTypeName(type)] = count;
  }
  return json{{"flip", report.flip},
              {"nd_term", report.nd_term},
              {"gp_term", report.gp_term},
              {"num_ops", report.num_ops},
              {"op_histogram", std::move(histogram)}};
}

json sequenceReportJson(const ExplanationSequence& seq) {
  json j;
  j["format"] = "scorecf-report";
  j["version"] = 1;
  j["original"] = graphDumpJson(seq.original);
  j["original_prediction"] = seq.original_prediction;
  j["original_valid"] = seq.original_valid;
  j["label_names"] = seq.label_names;
  j["config"] = explainConfigToJson(seq.config);

  json steps = json::array();
  for (const ExplanationResult& r : seq.results) {
    const EditLogEntry& entry = r.log.back();
    steps.push_back(json{{"step", r.step_index},
                         {"op", editOpToJson(entry.op)},
                         {"delta", editDeltaToJson(entry.delta)},
                         {"prediction", r.prediction},
                         {"valid", r.valid},
                         {"loss", lossBreakdownToJson(r.loss)},
                         {"wall_time_seconds", r.wall_time_seconds}});
  }
  j["steps"] = std::move(steps);

  json summary{{"first_valid_step", nullptr},
               {"dominant_op", nullptr},
               {"total_ops", seq.summary.total_ops},
               {"total_time_seconds", seq.summary.total_time_seconds},
               {"truncated", seq.summary.truncated},
               {"truncation_reason", seq.summary.truncation_reason}};
  if (seq.summary.first_valid_step) summary["first_valid_step"] = *seq.summary.first_valid_step;
  if (seq.summary.dominant_op) summary["dominant_op"] = editOpTypeName(*seq.summary.dominant_op);
  if (seq.summary.first_valid_step && *seq.summary.first_valid_step > 0) {
    const auto& result = seq.results[static_cast<std::size_t>(*seq.summary.first_valid_step - 1)];
    summary["first_valid_score"] = scoreReportToJson(scoreExplanation(result, seq.original));
  }
  j["summary"] = std::move(summary);
  return j;
}

ExplanationSequence sequenceFromReportJson(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "scorecf-report") {
      throw ParseError("not an explanation report");
    }
    ExplanationSequence seq;
    seq.original = graphFromDumpJson(j.at("original"));
    seq.original_prediction = j.at("original_prediction").get<std::vector<double>>();
    seq.original_valid = j.at("original_valid").get<bool>();
    seq.label_names = j.at("label_names").get<std::vector<std::string>>();
    seq.config = explainConfigFromJson(j.at("config"));

    ScoreGraph current = seq.original;
    EditLog log;
    for (const json& step : j.at("steps")) {
      const EditOp op = editOpFromJson(step.at("op"));
      auto [next, delta] = applyEdit(current, op);
      if (delta != editDeltaFromJson(step.at("delta"))) {
        throw SearchError("report delta diverges from replay at step " +
                          std::to_string(step.at("step").get<int>()));
      }
      log.push_back({op, delta});
      current = std::move(next);

      ExplanationResult r;
      r.step_index = step.at("step").get<int>();
      r.graph = current;
      r.log = log;
      r.prediction = step.at("prediction").get<std::vector<double>>();
      r.valid = step.at("valid").get<bool>();
      const json& loss = step.at("loss");
      r.loss.entropy_term = loss.at("entropy_term").get<double>();
      r.loss.nd_term = loss.at("nd_term").get<double>();
      r.loss.gp_term = loss.at("gp_term").get<double>();
      r.loss.total = loss.at("total").get<double>();
      r.wall_time_seconds = step.at("wall_time_seconds").get<double>();
      seq.results.push_back(std::move(r));
    }

    const json& summary = j.at("summary");
    if (!summary.at("first_valid_step").is_null()) {
      seq.summary.first_valid_step = summary.at("first_valid_step").get<int>();
    }
    if (!summary.at("dominant_op").is_null()) {
      const auto t = editOpTypeFromName(summary.at("dominant_op").get<std::string>());
      if (t) seq.summary.dominant_op = *t;
    }
    seq.summary.total_ops = summary.at("total_ops").get<int>();
    seq.summary.total_time_seconds = summary.at("total_time_seconds").get<double>();
    seq.summary.truncated = summary.at("truncated").get<bool>();
    seq.summary.truncation_reason = summary.at("truncation_reason").get<std::string>();
    return seq;
  } catch (const json::exception& e) {
    throw ParseError(std::string("explanation report: ") + e.what());
  }
}

}  // namespace scorecf
