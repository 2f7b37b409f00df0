#pragma once

#include "agents/client.hpp"
#include "agents/prompting.hpp"
#include "core/records.hpp"
#include "evalsuite/judge.hpp"
#include "tsmodel/features.hpp"
#include "tsmodel/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace seqdiag::agents {

/// Sequential-model prediction for one window, rendered as a hint block.
TimeAgentOutput time_agent_predict(const HistoryWindow& window,
                                   const model::TsModel& ts_model,
                                   const model::EncoderProvider& provider,
                                   bool include_confidence = true);

struct AgentReport {
    size_t n_samples = 0;  // successfully diagnosed
    size_t n_failures = 0; // client or parse failures, excluded from rates
    size_t n_repaired = 0; // parent-inconsistency repairs
    double acc_type = 0.0;
    double acc_subtype = 0.0;
    double mean_reasoning_score = 0.0;
    double mean_suggestion_score = 0.0;
    std::optional<double> adoption_rate; // only when the time agent ran
};

struct OrchestratorConfig {
    bool with_time_agent = true;
    bool include_confidence = true;
    std::string transcript_path; // JSON-Lines prompt/reply log when non-empty
};

/// Full two-agent pass over labeled windows: optional time-agent hint,
/// prompt assembly, client call, parsing, and scoring against the reference
/// reason/suggestion texts. Per-sample failures are counted and excluded
/// from the rates. Sample order is deterministic.
AgentReport orchestrate(const std::vector<HistoryWindow>& windows,
                        const model::TsModel* ts_model,
                        const model::EncoderProvider* provider, ChatClient& client,
                        const eval::Judge& judge, const OrchestratorConfig& cfg);

/// Table-3-shaped rendering over named conditions.
struct AgentReportRow {
    std::string condition;
    std::string client_name;
    AgentReport report;
};

std::string agent_report_csv(const std::vector<AgentReportRow>& rows);
std::string agent_report_table(const std::vector<AgentReportRow>& rows);

} // namespace seqdiag::agents
