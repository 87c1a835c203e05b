/* scorecf - counterfactual explanations for score-graph classifiers.
 *
 * C API over the core engine. Handles are opaque; every function that can
 * fail returns a status code and leaves a message readable through
 * scorecf_last_error() (thread-local). Structured data crosses the boundary
 * as JSON text in the documented formats (note lists, graph dumps,
 * explanation configs and reports, experiment manifests and tables). Strings
 * returned through char** are heap-allocated; release them with
 * scorecf_string_free().
 */

#ifndef SCORECF_H
#define SCORECF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SCORECF_API __declspec(dllexport)
#else
#define SCORECF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scorecf_status {
  SCORECF_OK = 0,
  SCORECF_ERROR_PARSE = 1,      /* malformed input document */
  SCORECF_ERROR_VALIDATION = 2, /* well-formed input violating a constraint */
  SCORECF_ERROR_RUNTIME = 3     /* search/replay failure or internal error */
} scorecf_status;

typedef struct scorecf_graph scorecf_graph;
typedef struct scorecf_model scorecf_model;
typedef struct scorecf_sequence scorecf_sequence;

SCORECF_API const char* scorecf_version(void);

/* Message for the most recent failing call on this thread ("" when none). */
SCORECF_API const char* scorecf_last_error(void);

SCORECF_API void scorecf_string_free(char* text);

/* ---- graphs ---- */

/* Note-list JSON -> graph with derived timing edges. */
SCORECF_API scorecf_status scorecf_graph_parse_json(const char* text, scorecf_graph** out_graph);

/* MusicXML subset -> graph. */
SCORECF_API scorecf_status scorecf_graph_parse_musicxml(const char* text,
                                                        scorecf_graph** out_graph);

/* Replaces the graph with a copy carrying beat/measure nodes. Lengths are
 * rational strings in quarter units ("1", "3/2"). */
SCORECF_API scorecf_status scorecf_graph_attach_hierarchy(scorecf_graph* graph,
                                                          const char* beat_length,
                                                          const char* measure_length);

SCORECF_API scorecf_status scorecf_graph_set_name(scorecf_graph* graph, const char* name);

/* Graph dump JSON: {notes, edges, hierarchy?, metadata}. */
SCORECF_API scorecf_status scorecf_graph_dump_json(const scorecf_graph* graph, char** out_text);

/* The graph's notes as note-list JSON. */
SCORECF_API scorecf_status scorecf_graph_notes_json(const scorecf_graph* graph, char** out_text);

SCORECF_API scorecf_status scorecf_graph_to_musicxml(const scorecf_graph* graph, char** out_text);

/* Number of non-removed notes. */
SCORECF_API int64_t scorecf_graph_note_count(const scorecf_graph* graph);

/* Edges of one type ("onset", "consecutive", "during", "rest", "note_to_beat",
 * "note_to_measure"), or all edges when edge_type is NULL. -1 on unknown
 * type. */
SCORECF_API int64_t scorecf_graph_edge_count(const scorecf_graph* graph, const char* edge_type);

SCORECF_API void scorecf_graph_free(scorecf_graph* graph);

/* ---- models ---- */

/* Builtin spec: "const:<i>", "rule:pitch_class:<pc>", "rule:onset_peer:<pc>",
 * "rule:cadence", "gnn[:k=v,...]", "gnn_trained[:k=v,...]". */
SCORECF_API scorecf_status scorecf_model_create(const char* spec, scorecf_model** out_model);

/* Checkpoint JSON (format "scorecf-gnn") -> model. */
SCORECF_API scorecf_status scorecf_model_load_json(const char* text, scorecf_model** out_model);

/* Checkpoint JSON for reference-network models; validation error for models
 * without parameters. */
SCORECF_API scorecf_status scorecf_model_save_json(const scorecf_model* model, char** out_text);

SCORECF_API int scorecf_model_num_classes(const scorecf_model* model);

/* JSON array of label names. */
SCORECF_API scorecf_status scorecf_model_labels_json(const scorecf_model* model, char** out_text);

/* Per-note class distributions as JSON {note_id: [p0, p1, ...]}. */
SCORECF_API scorecf_status scorecf_model_classify_json(const scorecf_model* model,
                                                       const scorecf_graph* graph,
                                                       char** out_text);

SCORECF_API void scorecf_model_free(scorecf_model* model);

/* ---- explanations ---- */

/* config_json fields (all optional except target_node): n, t, target_node,
 * target_label, mode ("greedy"|"learned"), lambda, lambda_nd, lambda_gp,
 * policy_lr, ops (array), op_path (array), pitch_window, max_candidates,
 * seed, time_budget. */
SCORECF_API scorecf_status scorecf_explain(const scorecf_model* model,
                                           const scorecf_graph* graph, const char* config_json,
                                           scorecf_sequence** out_sequence);

/* Explanation-sequence report JSON. */
SCORECF_API scorecf_status scorecf_sequence_report_json(const scorecf_sequence* sequence,
                                                        char** out_text);

/* Rebuilds a sequence from a report, replaying and verifying the edit log. */
SCORECF_API scorecf_status scorecf_sequence_load_report(const char* report_json,
                                                        scorecf_sequence** out_sequence);

/* Number of produced explanations (the original is step 0). */
SCORECF_API int64_t scorecf_sequence_step_count(const scorecf_sequence* sequence);

/* Graph at a step; step 0 is the original. Caller frees the graph. */
SCORECF_API scorecf_status scorecf_sequence_step_graph(const scorecf_sequence* sequence,
                                                       int64_t step,
                                                       scorecf_graph** out_graph);

/* MusicXML of a step with removed notes omitted and every note touched by an
 * edit so far colored. */
SCORECF_API scorecf_status scorecf_sequence_step_musicxml(const scorecf_sequence* sequence,
                                                          int64_t step, char** out_text);

SCORECF_API void scorecf_sequence_free(scorecf_sequence* sequence);

/* ---- experiments ---- */

/* manifest_json: {pieces: [<note-list or graph dump>, ...],
 *                 model: "<builtin spec>" | {checkpoint object},
 *                 grid: [{name, config}, ...], repeats, seed}.
 * Emits the experiment table JSON. */
SCORECF_API scorecf_status scorecf_run_experiment(const char* manifest_json, char** out_text);

/* Experiment table JSON -> CSV (one line per cell). */
SCORECF_API scorecf_status scorecf_table_to_csv(const char* table_json, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* SCORECF_H */
