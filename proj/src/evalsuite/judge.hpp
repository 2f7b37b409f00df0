#pragma once

#include "agents/client.hpp"

#include <memory>
#include <string>

namespace seqdiag::eval {

/// Quality score on the 0..10 rubric scale with its band.
struct JudgeBand {
    int score = 0; // 0..10

    /// 0-2 mismatched / 3-5 partially / 6-8 nearly / 9-10 fully.
    const char* band() const;
};

/// Lexical token-overlap F1 x 10, rounded half-up. Offline stand-in for the
/// external judge; symmetric in the two texts' token multisets.
JudgeBand fallback_judge_score(const std::string& generated,
                               const std::string& reference);

/// Rubric prompt sent to an external judge model.
std::string judge_prompt(const std::string& generated, const std::string& reference);

/// Scores generated text against a reference. With a client, sends the
/// rubric prompt and parses an integer 0..10 (one retry, then
/// UnparseableJudgeReply); without one, uses the lexical fallback.
class Judge {
public:
    static Judge fallback();
    static Judge external(std::shared_ptr<agents::ChatClient> client);

    JudgeBand score(const std::string& generated, const std::string& reference) const;

    bool is_fallback() const { return client_ == nullptr; }

private:
    Judge() = default;
    std::shared_ptr<agents::ChatClient> client_;
};

} // namespace seqdiag::eval
