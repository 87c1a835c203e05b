#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

#include "core/explainer.h"

namespace scorecf {

// One grid cell: a named explanation configuration evaluated over every piece
// and repeat. An empty target_node auto-selects, per piece, the first note
// (sorted id order) whose current prediction differs from the target label.
struct ExperimentCell {
  std::string name;
  ExplainConfig config;
};

struct ExperimentOptions {
  int repeats = 5;
  std::uint64_t seed = 0;
};

// Runs the grid and emits a table with exactly five metric rows per cell:
// accuracy (fraction of runs with any valid result), min_changes (first valid
// step over successful runs), operation (most frequent flipping op type),
// distance (nd/gp/weighted terms of the first valid result), time (full
// sequence wall time).
nlohmann::json runExperiment(const NodeClassifier& model, const std::vector<ScoreGraph>& pieces,
                             const std::vector<ExperimentCell>& grid,
                             const ExperimentOptions& options);

// Flat CSV rendering of the table (one line per cell).
std::string experimentTableCsv(const nlohmann::json& table);

// Deterministic per-piece target choice used when a cell has no target_node.
std::string autoTargetNode(const NodeClassifier& model, const ScoreGraph& piece,
                           int target_label);

}  // namespace scorecf
