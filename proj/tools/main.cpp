// Command-line front end over the scorecf C API: build score graphs, run
// counterfactual explanations and experiment grids, export viewer files.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scorecf/scorecf.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

[[noreturn]] void fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(code);
}

void check(scorecf_status status) {
  if (status == SCORECF_OK) return;
  const int code = status == SCORECF_ERROR_RUNTIME ? kExitRuntime : kExitValidation;
  fail(code, scorecf_last_error());
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitValidation, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitRuntime, "cannot write '" + path.string() + "'");
  out << text;
}

// Takes ownership of a C string from the API.
std::string takeString(char* text) {
  std::string out = text ? text : "";
  scorecf_string_free(text);
  return out;
}

bool looksLikeXml(const std::string& text) {
  for (const char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '<';
  }
  return false;
}

scorecf_graph* loadGraph(const std::string& path) {
  const std::string text = readFile(path);
  scorecf_graph* graph = nullptr;
  check(looksLikeXml(text) ? scorecf_graph_parse_musicxml(text.c_str(), &graph)
                           : scorecf_graph_parse_json(text.c_str(), &graph));
  const std::string name = fs::path(path).stem().string();
  check(scorecf_graph_set_name(graph, name.c_str()));
  return graph;
}

scorecf_model* loadModel(const std::string& spec) {
  scorecf_model* model = nullptr;
  if (fs::exists(spec)) {
    check(scorecf_model_load_json(readFile(spec).c_str(), &model));
  } else {
    check(scorecf_model_create(spec.c_str(), &model));
  }
  return model;
}

fs::path resolveOutDir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SCORECF_OUT_DIR")) return env;
  return ".";
}

int resolveTargetLabel(scorecf_model* model, const std::string& label) {
  try {
    std::size_t used = 0;
    const int index = std::stoi(label, &used);
    if (used == label.size()) return index;
  } catch (const std::exception&) {
  }
  char* labels_text = nullptr;
  check(scorecf_model_labels_json(model, &labels_text));
  const json labels = json::parse(takeString(labels_text));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].get<std::string>() == label) return static_cast<int>(i);
  }
  fail(kExitValidation, "unknown label '" + label + "' (valid: " + labels.dump() + ")");
}

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Explain-run manifest: flags and config file share these keys one-to-one;
// flags win when both are present.
struct ExplainManifest {
  json values = json::object();

  void mergeConfigFile(const std::string& path) {
    const json file = json::parse(readFile(path));
    for (const auto& [key, value] : file.items()) {
      if (!values.contains(key)) values[key] = value;
    }
  }

  json engineConfig() const {
    json config = values;
    config.erase("input");
    config.erase("model");
    config.erase("out");
    return config;
  }
};

int cmdBuild(const std::string& input, const std::string& out_file, const std::string& beat,
             const std::string& measure) {
  scorecf_graph* graph = loadGraph(input);
  if (!beat.empty() || !measure.empty()) {
    if (beat.empty() || measure.empty()) {
      fail(kExitValidation, "--beat-length and --measure-length go together");
    }
    check(scorecf_graph_attach_hierarchy(graph, beat.c_str(), measure.c_str()));
  }
  char* dump = nullptr;
  check(scorecf_graph_dump_json(graph, &dump));
  const std::string text = takeString(dump);
  if (!out_file.empty()) writeFile(out_file, text);

  std::cout << "notes: " << scorecf_graph_note_count(graph) << "\n";
  for (const char* type : {"onset", "consecutive", "during", "rest", "note_to_beat",
                           "note_to_measure"}) {
    std::cout << type << ": " << scorecf_graph_edge_count(graph, type) << "\n";
  }
  scorecf_graph_free(graph);
  return 0;
}

void writeStepFiles(scorecf_sequence* sequence, const fs::path& dir, bool musicxml,
                    bool graphs) {
  const int64_t steps = scorecf_sequence_step_count(sequence);
  for (int64_t step = 0; step <= steps; ++step) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "step_%03d", static_cast<int>(step));
    if (graphs) {
      scorecf_graph* g = nullptr;
      check(scorecf_sequence_step_graph(sequence, step, &g));
      char* dump = nullptr;
      check(scorecf_graph_dump_json(g, &dump));
      writeFile(dir / (std::string(suffix) + ".graph.json"), takeString(dump));
      scorecf_graph_free(g);
    }
    if (musicxml) {
      char* xml = nullptr;
      check(scorecf_sequence_step_musicxml(sequence, step, &xml));
      writeFile(dir / (std::string(suffix) + ".musicxml"), takeString(xml));
    }
  }
}

int cmdExplain(const ExplainManifest& manifest) {
  const std::string input = manifest.values.value("input", "");
  const std::string model_spec = manifest.values.value("model", "");
  if (input.empty() || model_spec.empty()) {
    fail(kExitValidation, "explain needs --input and --model");
  }
  scorecf_graph* graph = loadGraph(input);
  scorecf_model* model = loadModel(model_spec);

  json config = manifest.engineConfig();
  if (config.contains("target_label") && config["target_label"].is_string()) {
    config["target_label"] =
        resolveTargetLabel(model, config["target_label"].get<std::string>());
  }

  scorecf_sequence* sequence = nullptr;
  check(scorecf_explain(model, graph, config.dump().c_str(), &sequence));

  const fs::path out_dir = resolveOutDir(manifest.values.value("out", ""));
  fs::create_directories(out_dir);

  char* report = nullptr;
  check(scorecf_sequence_report_json(sequence, &report));
  const std::string report_text = takeString(report);
  writeFile(out_dir / "report.json", report_text);
  writeFile(out_dir / "run_manifest.json", manifest.values.dump(2) + "\n");
  writeStepFiles(sequence, out_dir, true, true);

  const json parsed = json::parse(report_text);
  const json& summary = parsed.at("summary");
  std::cout << "steps: " << parsed.at("steps").size() << "\n";
  std::cout << "first_valid_step: " << summary.at("first_valid_step").dump() << "\n";
  std::cout << "dominant_op: " << summary.at("dominant_op").dump() << "\n";
  std::cout << "report: " << (out_dir / "report.json").string() << "\n";

  scorecf_sequence_free(sequence);
  scorecf_model_free(model);
  scorecf_graph_free(graph);
  return 0;
}

int cmdExperiment(const std::string& manifest_path, const std::string& out_flag) {
  json manifest = json::parse(readFile(manifest_path));
  // Piece entries given as paths are inlined before the engine sees them.
  if (manifest.contains("pieces")) {
    for (json& piece : manifest["pieces"]) {
      if (piece.is_string()) {
        const std::string text = readFile(piece.get<std::string>());
        if (looksLikeXml(text)) {
          scorecf_graph* g = nullptr;
          check(scorecf_graph_parse_musicxml(text.c_str(), &g));
          char* notes = nullptr;
          check(scorecf_graph_notes_json(g, &notes));
          piece = json::parse(takeString(notes));
          scorecf_graph_free(g);
        } else {
          piece = json::parse(text);
        }
      }
    }
  }

  char* table = nullptr;
  check(scorecf_run_experiment(manifest.dump().c_str(), &table));
  const std::string table_text = takeString(table);
  char* csv = nullptr;
  check(scorecf_table_to_csv(table_text.c_str(), &csv));
  const std::string csv_text = takeString(csv);

  const fs::path out_dir = resolveOutDir(out_flag);
  fs::create_directories(out_dir);
  writeFile(out_dir / "table.json", table_text);
  writeFile(out_dir / "table.csv", csv_text);
  std::cout << csv_text;
  std::cout << "table: " << (out_dir / "table.json").string() << "\n";
  return 0;
}

int cmdExport(const std::string& report_path, const std::string& format,
              const std::string& out_flag) {
  if (format != "musicxml" && format != "graph" && format != "all") {
    fail(kExitValidation, "unknown format '" + format + "' (musicxml|graph|all)");
  }
  scorecf_sequence* sequence = nullptr;
  check(scorecf_sequence_load_report(readFile(report_path).c_str(), &sequence));

  const fs::path out_dir = resolveOutDir(out_flag);
  fs::create_directories(out_dir);
  writeStepFiles(sequence, out_dir, format != "graph", format != "musicxml");
  std::cout << "steps: " << scorecf_sequence_step_count(sequence) << "\n";
  scorecf_sequence_free(sequence);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual explanations for score-graph classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scorecf_version());

  // build
  auto* build = app.add_subcommand("build", "parse a score and dump its graph");
  std::string build_input;
  std::string build_out;
  std::string build_beat;
  std::string build_measure;
  build->add_option("--input", build_input, "note-list JSON or MusicXML file")->required();
  build->add_option("--out", build_out, "graph dump output file");
  build->add_option("--beat-length", build_beat, "attach hierarchy: beat length (quarters)");
  build->add_option("--measure-length", build_measure, "attach hierarchy: measure length");

  // explain
  auto* explain = app.add_subcommand("explain", "produce counterfactual explanations");
  std::string ex_input, ex_model, ex_out, ex_config, ex_target_node, ex_target_label;
  std::string ex_mode, ex_ops, ex_op_path;
  int ex_n = -1, ex_t = -1, ex_pitch_window = -1, ex_max_candidates = -1;
  double ex_lambda = -1.0, ex_lambda_nd = -1.0, ex_lambda_gp = -1.0, ex_policy_lr = -1.0;
  double ex_time_budget = -1.0;
  std::int64_t ex_seed = -1;
  explain->add_option("--input", ex_input, "note-list JSON or MusicXML file");
  explain->add_option("--model", ex_model, "builtin model spec or checkpoint path");
  explain->add_option("--config", ex_config, "JSON config file mirroring the flags");
  explain->add_option("--target-node", ex_target_node, "note id to explain");
  explain->add_option("--target-label", ex_target_label, "desired class (index or name)");
  explain->add_option("--n", ex_n, "number of explanations");
  explain->add_option("--t", ex_t, "inner training steps per explanation");
  explain->add_option("--mode", ex_mode, "greedy or learned");
  explain->add_option("--lambda", ex_lambda, "entropy weight");
  explain->add_option("--lambda-nd", ex_lambda_nd, "node distance weight");
  explain->add_option("--lambda-gp", ex_lambda_gp, "graph distance weight");
  explain->add_option("--policy-lr", ex_policy_lr, "policy learning rate");
  explain->add_option("--ops", ex_ops, "allowed ops, comma list (pitch,onset,dur,rem,add)");
  explain->add_option("--op-path", ex_op_path, "prescribed op per step, comma list");
  explain->add_option("--pitch-window", ex_pitch_window, "pitch candidates: +/- semitones");
  explain->add_option("--max-candidates", ex_max_candidates, "candidate subsample cap");
  explain->add_option("--seed", ex_seed, "random seed");
  explain->add_option("--time-budget", ex_time_budget, "wall-clock budget in seconds");
  explain->add_option("--out", ex_out, "output directory (or $SCORECF_OUT_DIR)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a configuration grid");
  std::string exp_manifest, exp_out;
  experiment->add_option("--manifest", exp_manifest, "grid manifest JSON")->required();
  experiment->add_option("--out", exp_out, "output directory (or $SCORECF_OUT_DIR)");

  // export
  auto* exp_cmd = app.add_subcommand("export", "re-emit viewer files from a report");
  std::string export_report, export_format = "all", export_out;
  exp_cmd->add_option("--report", export_report, "explanation report JSON")->required();
  exp_cmd->add_option("--format", export_format, "musicxml, graph, or all");
  exp_cmd->add_option("--out", export_out, "output directory (or $SCORECF_OUT_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (build->parsed()) {
      return cmdBuild(build_input, build_out, build_beat, build_measure);
    }
    if (explain->parsed()) {
      ExplainManifest manifest;
      auto setIf = [&](const char* key, const json& value, bool given) {
        if (given) manifest.values[key] = value;
      };
      setIf("input", ex_input, !ex_input.empty());
      setIf("model", ex_model, !ex_model.empty());
      setIf("out", ex_out, !ex_out.empty());
      setIf("target_node", ex_target_node, !ex_target_node.empty());
      setIf("target_label", ex_target_label, !ex_target_label.empty());
      setIf("n", ex_n, ex_n >= 0);
      setIf("t", ex_t, ex_t >= 0);
      setIf("mode", ex_mode, !ex_mode.empty());
      setIf("lambda", ex_lambda, ex_lambda >= 0.0);
      setIf("lambda_nd", ex_lambda_nd, ex_lambda_nd >= 0.0);
      setIf("lambda_gp", ex_lambda_gp, ex_lambda_gp >= 0.0);
      setIf("policy_lr", ex_policy_lr, ex_policy_lr >= 0.0);
      setIf("ops", splitList(ex_ops), !ex_ops.empty());
      setIf("op_path", splitList(ex_op_path), !ex_op_path.empty());
      setIf("pitch_window", ex_pitch_window, ex_pitch_window >= 0);
      setIf("max_candidates", ex_max_candidates, ex_max_candidates >= 0);
      setIf("seed", ex_seed, ex_seed >= 0);
      setIf("time_budget", ex_time_budget, ex_time_budget >= 0.0);
      if (!ex_config.empty()) manifest.mergeConfigFile(ex_config);
      return cmdExplain(manifest);
    }
    if (experiment->parsed()) {
      return cmdExperiment(exp_manifest, exp_out);
    }
    if (exp_cmd->parsed()) {
      return cmdExport(export_report, export_format, export_out);
    }
  } catch (const json::exception& e) {
    fail(kExitValidation, e.what());
  }
  return 0;
}
