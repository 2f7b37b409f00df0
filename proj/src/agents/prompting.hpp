#pragma once

#include "core/records.hpp"
#include "tsmodel/model.hpp"

#include <optional>
#include <string>

namespace seqdiag::agents {

/// Time-series agent output as handed to the language-model agent.
struct TimeAgentOutput {
    model::Prediction prediction;
    std::string rendered_hint;
};

inline constexpr const char* kHintBegin = "=== Predicted Error Type ===";
inline constexpr const char* kHintEnd = "=== End Predicted Error Type ===";

/// Chain-of-thought instruction included verbatim in every prompt.
inline constexpr const char* kThinkingInstruction =
    "Please explain your reasoning process in the form of 'thinking'.";

/// Hint text naming the predicted type and subtype, optionally with the
/// type-head confidence.
TimeAgentOutput render_hint(const model::Prediction& prediction,
                            bool include_confidence = true);

/// Diagnosis prompt: full taxonomy with definitions, the attempt's
/// model-visible fields, the optional delimited hint block, the
/// chain-of-thought instruction, and the reply line format.
std::string build_prompt(const AttemptRecord& attempt,
                         const std::optional<TimeAgentOutput>& hint);

/// Labels found in a prompt's hint block, if any (used by the offline stub).
std::optional<ErrorLabel> extract_hint_labels(const std::string& prompt);

/// Final agent output for one attempt.
struct Diagnosis {
    int type_id = 0;
    int subtype_id = 0;
    std::string thinking;
    std::string reason;
    std::string suggestion;
    /// Parent-inconsistent replies are repaired by trusting SUB_TYPE.
    bool repaired_parent = false;
    /// Final type equals the time-agent hint; set only when a hint was present.
    std::optional<bool> adopted_hint;
};

/// Extract THINKING / ERROR_TYPE / SUB_TYPE / REASON / SUGGESTION lines
/// (case-insensitive keys, first occurrence wins). Names are matched against
/// the taxonomy by normalized exact match. Throws UnparseableResponse when
/// ERROR_TYPE or SUB_TYPE is missing or unmatched.
Diagnosis parse_response(const std::string& text);

} // namespace seqdiag::agents
