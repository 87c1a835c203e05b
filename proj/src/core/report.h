#pragma once

#include <nlohmann/json_fwd.hpp>

#include "core/explainer.h"

namespace scorecf {

nlohmann::json explainConfigToJson(const ExplainConfig& config);
ExplainConfig explainConfigFromJson(const nlohmann::json& j);

nlohmann::json lossBreakdownToJson(const LossBreakdown& loss);
nlohmann::json scoreReportToJson(const ScoreReport& report);

// Full explanation-sequence report: original graph dump, per-step op, delta,
// prediction, loss, timing, and a summary block.
nlohmann::json sequenceReportJson(const ExplanationSequence& seq);

// Rebuilds a sequence from its report by replaying the logged ops against the
// embedded original; throws SearchError when a recorded delta diverges.
ExplanationSequence sequenceFromReportJson(const nlohmann::json& j);

}  // namespace scorecf
