#include "core/experiment.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.h"
#include "core/report.h"

namespace scorecf {

using nlohmann::json;

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

MeanStd meanStd(const std::vector<double>& values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) return out;
  for (const double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

json meanStdJson(const MeanStd& m) {
  return json{{"mean", m.mean}, {"std", m.std}, {"count", m.count}};
}

}  // namespace

std::string autoTargetNode(const NodeClassifier& model, const ScoreGraph& piece,
                           int target_label) {
  const auto preds = model.classify(piece);
  for (const auto& [id, dist] : preds) {  // map order = sorted ids
    const int argmax =
        static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    if (argmax != target_label) return id;
  }
  if (!preds.empty()) return preds.begin()->first;
  throw ValidationError("piece '" + piece.metadata().piece_name + "' has no active notes");
}

json runExperiment(const NodeClassifier& model, const std::vector<ScoreGraph>& pieces,
                   const std::vector<ExperimentCell>& grid, const ExperimentOptions& options) {
  if (pieces.empty() || grid.empty()) {
    throw ValidationError("experiment needs at least one piece and one grid cell");
  }
  if (options.repeats < 1) throw ValidationError("repeats must be at least 1");

  json cells = json::array();
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    const ExperimentCell& cell = grid[ci];

    std::vector<double> min_changes;
    std::vector<double> nd_terms;
    std::vector<double> gp_terms;
    std::vector<double> weighted_terms;
    std::vector<double> times;
    std::map<std::string, int> flip_ops;
    int successes = 0;
    int run_count = 0;
    json runs = json::array();

    for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
      const ScoreGraph& piece = pieces[pi];
      const std::string target =
          cell.config.target_node.empty()
              ? autoTargetNode(model, piece, cell.config.target_label)
              : cell.config.target_node;
      for (int rep = 0; rep < options.repeats; ++rep) {
        ExplainConfig config = cell.config;
        config.target_node = target;
        config.seed = deriveSeed(options.seed, (ci * pieces.size() + pi) * 1000003ULL +
                                                   static_cast<std::uint64_t>(rep));
        const ExplanationSequence seq = explain(model, piece, config);
        ++run_count;

        json run{{"piece", piece.metadata().piece_name},
                 {"repeat", rep},
                 {"seed", config.seed},
                 {"target_node", target},
                 {"first_valid_step", nullptr},
                 {"flip_op", nullptr},
                 {"time_seconds", seq.summary.total_time_seconds},
                 {"truncated", seq.summary.truncated}};
        times.push_back(seq.summary.total_time_seconds);

        if (seq.summary.first_valid_step) {
          ++successes;
          const int k = *seq.summary.first_valid_step;
          min_changes.push_back(static_cast<double>(k));
          run["first_valid_step"] = k;
          double nd = 0.0;
          double gp = 0.0;
          double weighted = 0.0;
          std::string flip_op = "none";
          if (k > 0) {
            const ExplanationResult& r = seq.results[static_cast<std::size_t>(k - 1)];
            nd = r.loss.nd_term;
            gp = r.loss.gp_term;
            weighted = config.loss.lambda_nd * nd + config.loss.lambda_gp * gp;
            flip_op = editOpTypeName(r.log.back().op.type);
          }
          nd_terms.push_back(nd);
          gp_terms.push_back(gp);
          weighted_terms.push_back(weighted);
          flip_ops[flip_op] += 1;
          run["flip_op"] = flip_op;
        }
        runs.push_back(std::move(run));
      }
    }

    std::string operation = "none";
    int best_count = 0;
    for (const auto& [op, count] : flip_ops) {
      if (count > best_count) {
        operation = op;
        best_count = count;
      }
    }

    json metrics{{"accuracy",
                  run_count == 0 ? 0.0 : static_cast<double>(successes) / run_count},
                 {"min_changes", meanStdJson(meanStd(min_changes))},
                 {"operation", operation},
                 {"distance",
                  json{{"nd", meanStdJson(meanStd(nd_terms))},
                       {"gp", meanStdJson(meanStd(gp_terms))},
                       {"weighted", meanStdJson(meanStd(weighted_terms))}}},
                 {"time", meanStdJson(meanStd(times))}};

    cells.push_back(json{{"cell", cell.name},
                         {"config", explainConfigToJson(cell.config)},
                         {"metrics", std::move(metrics)},
                         {"runs", std::move(runs)}});
  }

  return json{{"format", "scorecf-experiment"},
              {"version", 1},
              {"repeats", options.repeats},
              {"num_pieces", pieces.size()},
              {"cells", std::move(cells)}};
}

std::string experimentTableCsv(const json& table) {
  std::ostringstream out;
  out << "cell,accuracy,min_changes_mean,min_changes_std,operation,"
         "nd_mean,nd_std,gp_mean,gp_std,weighted_mean,weighted_std,time_mean,time_std\n";
  for (const json& cell : table.at("cells")) {
    const json& m = cell.at("metrics");
    const json& d = m.at("distance");
    out << cell.at("cell").get<std::string>() << ',' << m.at("accuracy").get<double>() << ','
        << m.at("min_changes").at("mean").get<double>() << ','
        << m.at("min_changes").at("std").get<double>() << ','
        << m.at("operation").get<std::string>() << ',' << d.at("nd").at("mean").get<double>()
        << ',' << d.at("nd").at("std").get<double>() << ',' << d.at("gp").at("mean").get<double>()
        << ',' << d.at("gp").at("std").get<double>() << ','
        << d.at("weighted").at("mean").get<double>() << ','
        << d.at("weighted").at("std").get<double>() << ',' << m.at("time").at("mean").get<double>()
        << ',' << m.at("time").at("std").get<double>() << '\n';
  }
  return out.str();
}

}  // namespace scorecf
