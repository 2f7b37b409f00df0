#pragma once

#include "core/records.hpp"
#include "tsmodel/modal_features.hpp"
#include "tsmodel/provider.hpp"

#include <string>
#include <vector>

namespace seqdiag::model {

/// Reserved stand-in for the query attempt's label portion; the ground-truth
/// label never reaches the embedded text.
inline constexpr const char* kUnknownLabelSentinel = "[label unknown]";

/// Model-visible text for one attempt: problem, both answers, analysis, and
/// the label portion (real names for history, the sentinel for the query).
std::string attempt_text(const AttemptRecord& attempt, bool include_label);

/// One ModalFeatures per attempt, history first, query last. Numeric
/// features are window-relative position / 20 and days since the previous
/// attempt / 30. Provider errors are rethrown as ProviderFailure naming the
/// attempt index.
std::vector<ModalFeatures> featurize(const HistoryWindow& window,
                                     const EncoderProvider& provider);

} // namespace seqdiag::model
