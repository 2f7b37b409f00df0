#pragma once

#include "core/taxonomy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqdiag {

/// One timestamped problem-solving attempt.
struct AttemptRecord {
    std::string student_id;
    int64_t timestamp = 0; // seconds since epoch, > 0
    std::string problem_text;
    std::string correct_answer;
    std::string student_answer;
    std::string analysis_text;
    std::string draft_ref; // opaque handle to a draft image
    std::optional<ErrorLabel> label;
    std::optional<std::string> reason_text;
    std::optional<std::string> suggestion_text;

    bool operator==(const AttemptRecord&) const = default;
};

/// Ordered per-student attempt sequence. Valid trajectories have strictly
/// increasing timestamps and a single student id.
struct StudentTrajectory {
    std::string student_id;
    std::vector<AttemptRecord> attempts;

    bool operator==(const StudentTrajectory&) const = default;
};

using Dataset = std::vector<StudentTrajectory>;

/// Ground truth for a window's query attempt. Kept out of AttemptRecord so
/// feature assembly cannot reach it.
struct QueryTruth {
    std::optional<ErrorLabel> label;
    std::optional<std::string> reason_text;
    std::optional<std::string> suggestion_text;
};

/// Up to max_history labeled attempts followed by one query attempt whose
/// label has been stripped from the model-visible record. history is empty
/// only for windows built by query_only_window.
struct HistoryWindow {
    std::string student_id;
    std::vector<AttemptRecord> history;
    AttemptRecord query;
    QueryTruth truth;
    int query_index = 0; // position of the query within its trajectory
};

inline constexpr int kMaxHistory = 20;
inline constexpr int64_t kSecondsPerDay = 86400;
// "One month" fixed as 30 days.
inline constexpr int64_t kMaxGapSeconds = 30 * kSecondsPerDay;

/// Every invariant violation found, as human-readable strings. Violations
/// are data, not faults; an empty result means the trajectory is valid.
std::vector<std::string> validate_trajectory(const StudentTrajectory& t);

/// Window of up to max_history attempts immediately preceding query_index.
/// All history attempts must be labeled; every consecutive gap inside the
/// window (including history -> query) must be <= max_gap.
HistoryWindow make_window(const StudentTrajectory& t, int query_index,
                          int max_history = kMaxHistory,
                          int64_t max_gap = kMaxGapSeconds);

/// Degenerate window with no history, for the no-sequence baseline.
HistoryWindow query_only_window(const StudentTrajectory& t, int query_index);

} // namespace seqdiag
