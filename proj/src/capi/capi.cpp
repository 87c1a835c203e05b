#include "scorecf/scorecf.h"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "core/edits.h"
#include "core/errors.h"
#include "core/experiment.h"
#include "core/explainer.h"
#include "core/json_io.h"
#include "core/model.h"
#include "core/model_zoo.h"
#include "core/musicxml.h"
#include "core/report.h"
#include "core/score_graph.h"

using nlohmann::json;

struct scorecf_graph {
  scorecf::ScoreGraph graph;
};

struct scorecf_model {
  std::shared_ptr<scorecf::NodeClassifier> model;
};

struct scorecf_sequence {
  scorecf::ExplanationSequence sequence;
};

namespace {

thread_local std::string g_last_error;

scorecf_status failWith(scorecf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
scorecf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SCORECF_OK;
  } catch (const scorecf::ParseError& e) {
    return failWith(SCORECF_ERROR_PARSE, e.what());
  } catch (const scorecf::ValidationError& e) {
    return failWith(SCORECF_ERROR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return failWith(SCORECF_ERROR_RUNTIME, e.what());
  }
}

char* copyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

scorecf_status requireArgs(bool ok) {
  return ok ? SCORECF_OK : failWith(SCORECF_ERROR_VALIDATION, "null argument");
}

const scorecf::ScoreGraph* stepGraph(const scorecf_sequence* sequence, int64_t step) {
  if (step < 0 || step > static_cast<int64_t>(sequence->sequence.results.size())) return nullptr;
  if (step == 0) return &sequence->sequence.original;
  return &sequence->sequence.results[static_cast<std::size_t>(step - 1)].graph;
}

}  // namespace

extern "C" {

const char* scorecf_version(void) { return "0.1.0"; }

const char* scorecf_last_error(void) { return g_last_error.c_str(); }

void scorecf_string_free(char* text) { std::free(text); }

/* ---- graphs ---- */

scorecf_status scorecf_graph_parse_json(const char* text, scorecf_graph** out_graph) {
  if (requireArgs(text && out_graph)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    auto notes = scorecf::parseNoteListJson(text);
    *out_graph = new scorecf_graph{scorecf::buildGraph(std::move(notes))};
  });
}

scorecf_status scorecf_graph_parse_musicxml(const char* text, scorecf_graph** out_graph) {
  if (requireArgs(text && out_graph)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    auto notes = scorecf::parseMusicXml(text);
    *out_graph = new scorecf_graph{scorecf::buildGraph(std::move(notes))};
  });
}

scorecf_status scorecf_graph_attach_hierarchy(scorecf_graph* graph, const char* beat_length,
                                              const char* measure_length) {
  if (requireArgs(graph && beat_length && measure_length)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    graph->graph = scorecf::attachHierarchy(graph->graph, scorecf::parseRational(beat_length),
                                            scorecf::parseRational(measure_length));
  });
}

scorecf_status scorecf_graph_set_name(scorecf_graph* graph, const char* name) {
  if (requireArgs(graph && name)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    scorecf::GraphMetadata meta = graph->graph.metadata();
    meta.piece_name = name;
    graph->graph = scorecf::ScoreGraph::fromParts(graph->graph.notes(), graph->graph.edges(),
                                                  graph->graph.hierarchy(), std::move(meta));
  });
}

scorecf_status scorecf_graph_dump_json(const scorecf_graph* graph, char** out_text) {
  if (requireArgs(graph && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] { *out_text = copyString(scorecf::graphDumpJson(graph->graph).dump(2)); });
}

scorecf_status scorecf_graph_notes_json(const scorecf_graph* graph, char** out_text) {
  if (requireArgs(graph && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded(
      [&] { *out_text = copyString(scorecf::noteListJson(graph->graph.notes()).dump(2)); });
}

scorecf_status scorecf_graph_to_musicxml(const scorecf_graph* graph, char** out_text) {
  if (requireArgs(graph && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] { *out_text = copyString(scorecf::toMusicXml(graph->graph)); });
}

int64_t scorecf_graph_note_count(const scorecf_graph* graph) {
  if (!graph) return -1;
  return static_cast<int64_t>(graph->graph.activeNoteCount());
}

int64_t scorecf_graph_edge_count(const scorecf_graph* graph, const char* edge_type) {
  if (!graph) return -1;
  if (!edge_type) return static_cast<int64_t>(graph->graph.edges().size());
  const auto type = scorecf::edgeTypeFromName(edge_type);
  if (!type) return -1;
  int64_t count = 0;
  for (const scorecf::Edge& e : graph->graph.edges()) {
    if (e.type == *type) ++count;
  }
  return count;
}

void scorecf_graph_free(scorecf_graph* graph) { delete graph; }

/* ---- models ---- */

scorecf_status scorecf_model_create(const char* spec, scorecf_model** out_model) {
  if (requireArgs(spec && out_model)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] { *out_model = new scorecf_model{scorecf::createBuiltinModel(spec)}; });
}

scorecf_status scorecf_model_load_json(const char* text, scorecf_model** out_model) {
  if (requireArgs(text && out_model)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    auto model = std::make_shared<scorecf::ReferenceGnn>(
        scorecf::ReferenceGnn::fromCheckpointJson(scorecf::parseJsonText(text)));
    *out_model = new scorecf_model{std::move(model)};
  });
}

scorecf_status scorecf_model_save_json(const scorecf_model* model, char** out_text) {
  if (requireArgs(model && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    const auto* gnn = dynamic_cast<const scorecf::ReferenceGnn*>(model->model.get());
    if (!gnn) {
      throw scorecf::ValidationError("only reference-network models have checkpoints");
    }
    *out_text = copyString(gnn->toCheckpointJson().dump(2));
  });
}

int scorecf_model_num_classes(const scorecf_model* model) {
  return model ? model->model->numClasses() : -1;
}

scorecf_status scorecf_model_labels_json(const scorecf_model* model, char** out_text) {
  if (requireArgs(model && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] { *out_text = copyString(json(model->model->labelNames()).dump()); });
}

scorecf_status scorecf_model_classify_json(const scorecf_model* model,
                                           const scorecf_graph* graph, char** out_text) {
  if (requireArgs(model && graph && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    json out = json::object();
    for (const auto& [id, dist] : model->model->classify(graph->graph)) {
      out[id] = dist;
    }
    *out_text = copyString(out.dump(2));
  });
}

void scorecf_model_free(scorecf_model* model) { delete model; }

/* ---- explanations ---- */

scorecf_status scorecf_explain(const scorecf_model* model, const scorecf_graph* graph,
                               const char* config_json, scorecf_sequence** out_sequence) {
  if (requireArgs(model && graph && config_json && out_sequence)) {
    return SCORECF_ERROR_VALIDATION;
  }
  return guarded([&] {
    const scorecf::ExplainConfig config =
        scorecf::explainConfigFromJson(scorecf::parseJsonText(config_json));
    *out_sequence =
        new scorecf_sequence{scorecf::explain(*model->model, graph->graph, config)};
  });
}

scorecf_status scorecf_sequence_report_json(const scorecf_sequence* sequence, char** out_text) {
  if (requireArgs(sequence && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded(
      [&] { *out_text = copyString(scorecf::sequenceReportJson(sequence->sequence).dump(2)); });
}

scorecf_status scorecf_sequence_load_report(const char* report_json,
                                            scorecf_sequence** out_sequence) {
  if (requireArgs(report_json && out_sequence)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    *out_sequence = new scorecf_sequence{
        scorecf::sequenceFromReportJson(scorecf::parseJsonText(report_json))};
  });
}

int64_t scorecf_sequence_step_count(const scorecf_sequence* sequence) {
  return sequence ? static_cast<int64_t>(sequence->sequence.results.size()) : -1;
}

scorecf_status scorecf_sequence_step_graph(const scorecf_sequence* sequence, int64_t step,
                                           scorecf_graph** out_graph) {
  if (requireArgs(sequence && out_graph)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    const scorecf::ScoreGraph* g = stepGraph(sequence, step);
    if (!g) throw scorecf::ValidationError("step index out of range");
    *out_graph = new scorecf_graph{*g};
  });
}

scorecf_status scorecf_sequence_step_musicxml(const scorecf_sequence* sequence, int64_t step,
                                              char** out_text) {
  if (requireArgs(sequence && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    const scorecf::ScoreGraph* g = stepGraph(sequence, step);
    if (!g) throw scorecf::ValidationError("step index out of range");
    scorecf::MusicXmlOptions options;
    for (int64_t s = 1; s <= step; ++s) {
      const auto& result = sequence->sequence.results[static_cast<std::size_t>(s - 1)];
      const scorecf::EditOp& op = result.log.back().op;
      options.highlight_ids.insert(op.node_id);
    }
    *out_text = copyString(scorecf::toMusicXml(*g, options));
  });
}

void scorecf_sequence_free(scorecf_sequence* sequence) { delete sequence; }

/* ---- experiments ---- */

scorecf_status scorecf_run_experiment(const char* manifest_json, char** out_text) {
  if (requireArgs(manifest_json && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    const json manifest = scorecf::parseJsonText(manifest_json);

    std::vector<scorecf::ScoreGraph> pieces;
    for (const json& piece : manifest.at("pieces")) {
      if (piece.is_array()) {
        std::vector<scorecf::Note> notes;
        for (const json& n : piece) notes.push_back(scorecf::noteFromJson(n));
        pieces.push_back(scorecf::buildGraph(std::move(notes)));
      } else {
        pieces.push_back(scorecf::graphFromDumpJson(piece));
      }
    }

    std::shared_ptr<scorecf::NodeClassifier> model;
    const json& model_spec = manifest.at("model");
    if (model_spec.is_string()) {
      model = scorecf::createBuiltinModel(model_spec.get<std::string>());
    } else {
      model = std::make_shared<scorecf::ReferenceGnn>(
          scorecf::ReferenceGnn::fromCheckpointJson(model_spec));
    }

    std::vector<scorecf::ExperimentCell> grid;
    for (const json& cell : manifest.at("grid")) {
      scorecf::ExperimentCell c;
      c.name = cell.at("name").get<std::string>();
      c.config = scorecf::explainConfigFromJson(cell.at("config"));
      grid.push_back(std::move(c));
    }

    scorecf::ExperimentOptions options;
    options.repeats = manifest.value("repeats", 5);
    options.seed = manifest.value("seed", 0ULL);

    *out_text = copyString(scorecf::runExperiment(*model, pieces, grid, options).dump(2));
  });
}

scorecf_status scorecf_table_to_csv(const char* table_json, char** out_text) {
  if (requireArgs(table_json && out_text)) return SCORECF_ERROR_VALIDATION;
  return guarded([&] {
    *out_text =
        copyString(scorecf::experimentTableCsv(scorecf::parseJsonText(table_json)));
  });
}

}  // extern "C"
