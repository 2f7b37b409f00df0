#include "core/records.hpp"

#include "common/error.hpp"

namespace seqdiag {

std::vector<std::string> validate_trajectory(const StudentTrajectory& t) {
    std::vector<std::string> violations;
    for (size_t i = 0; i < t.attempts.size(); ++i) {
        const AttemptRecord& a = t.attempts[i];
        if (a.student_id != t.student_id)
            violations.push_back("attempt " + std::to_string(i) +
                                 ": student_id \"" + a.student_id +
                                 "\" does not match trajectory \"" + t.student_id + "\"");
        if (a.timestamp <= 0)
            violations.push_back("attempt " + std::to_string(i) + ": non-positive timestamp");
        if (a.problem_text.empty())
            violations.push_back("attempt " + std::to_string(i) + ": empty problem_text");
        if (i > 0 && t.attempts[i - 1].timestamp >= a.timestamp) {
            violations.push_back(
                "attempt " + std::to_string(i) +
                (t.attempts[i - 1].timestamp == a.timestamp
                     ? ": duplicate timestamp"
                     : ": timestamp not increasing"));
        }
    }
    return violations;
}

namespace {

AttemptRecord strip_truth(const AttemptRecord& r) {
    AttemptRecord visible = r;
    visible.label.reset();
    visible.reason_text.reset();
    visible.suggestion_text.reset();
    return visible;
}

QueryTruth extract_truth(const AttemptRecord& r) {
    return QueryTruth{r.label, r.reason_text, r.suggestion_text};
}

} // namespace

HistoryWindow make_window(const StudentTrajectory& t, int query_index,
                          int max_history, int64_t max_gap) {
    const int n = static_cast<int>(t.attempts.size());
    if (query_index < 1 || query_index >= n)
        raise(Status::InvalidArgument,
              "query_index " + std::to_string(query_index) +
                  " out of range for trajectory of length " + std::to_string(n));
    if (max_history < 1)
        raise(Status::InvalidArgument, "max_history must be >= 1");

    int begin = query_index - max_history;
    if (begin < 0) begin = 0;
    // Skip unlabeled prefix; the window needs fully labeled history.
    while (begin < query_index && !t.attempts[static_cast<size_t>(begin)].label)
        ++begin;
    if (begin == query_index)
        raise(Status::InsufficientHistory,
              "no labeled attempt precedes index " + std::to_string(query_index));

    for (int i = begin + 1; i <= query_index; ++i) {
        int64_t gap = t.attempts[static_cast<size_t>(i)].timestamp -
                      t.attempts[static_cast<size_t>(i - 1)].timestamp;
        if (gap > max_gap)
            raise(Status::GapTooLarge,
                  "gap of " + std::to_string(gap) + "s between attempts " +
                      std::to_string(i - 1) + " and " + std::to_string(i) +
                      " exceeds " + std::to_string(max_gap) + "s");
    }

    HistoryWindow w;
    w.student_id = t.student_id;
    w.query_index = query_index;
    w.history.assign(t.attempts.begin() + begin, t.attempts.begin() + query_index);
    w.query = strip_truth(t.attempts[static_cast<size_t>(query_index)]);
    w.truth = extract_truth(t.attempts[static_cast<size_t>(query_index)]);
    return w;
}

HistoryWindow query_only_window(const StudentTrajectory& t, int query_index) {
    const int n = static_cast<int>(t.attempts.size());
    if (query_index < 0 || query_index >= n)
        raise(Status::InvalidArgument,
              "query_index " + std::to_string(query_index) +
                  " out of range for trajectory of length " + std::to_string(n));
    HistoryWindow w;
    w.student_id = t.student_id;
    w.query_index = query_index;
    w.query = strip_truth(t.attempts[static_cast<size_t>(query_index)]);
    w.truth = extract_truth(t.attempts[static_cast<size_t>(query_index)]);
    return w;
}

} // namespace seqdiag
