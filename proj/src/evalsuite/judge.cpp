#include "evalsuite/judge.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace seqdiag::eval {

const char* JudgeBand::band() const {
    if (score <= 2) return "completely mismatched";
    if (score <= 5) return "partially correct";
    if (score <= 8) return "nearly correct";
    return "fully correct";
}

JudgeBand fallback_judge_score(const std::string& generated,
                               const std::string& reference) {
    std::vector<std::string> g = word_tokens(generated);
    std::vector<std::string> r = word_tokens(reference);
    if (g.empty() && r.empty()) return JudgeBand{10};
    if (g.empty() || r.empty()) return JudgeBand{0};

    std::map<std::string, int> counts;
    for (const std::string& t : g) ++counts[t];
    size_t overlap = 0;
    for (const std::string& t : r) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    double f1 = 2.0 * static_cast<double>(overlap) /
                static_cast<double>(g.size() + r.size());
    int score = static_cast<int>(std::floor(10.0 * f1 + 0.5)); // round half-up
    return JudgeBand{std::clamp(score, 0, 10)};
}

std::string judge_prompt(const std::string& generated, const std::string& reference) {
    return std::string(
               "You are grading a model-generated explanation against a reference "
               "written by a human expert. Score the match on a scale of 0 to 10:\n"
               "0-2: Completely mismatched; the reason or suggestion deviates entirely "
               "from the context or fails to explain the error.\n"
               "3-5: Partially correct; the output captures some aspects of the "
               "reasoning but lacks key details or precision.\n"
               "6-8: Nearly correct; the output aligns closely with the expert's "
               "reasoning but may miss minor details or nuances.\n"
               "9-10: Fully correct; the output matches the human expert's reasoning "
               "perfectly in both content and context.\n\n") +
           "Reference:\n" + reference + "\n\nGenerated:\n" + generated +
           "\n\nReply with a single integer between 0 and 10.";
}

Judge Judge::fallback() {
    return Judge();
}

Judge Judge::external(std::shared_ptr<agents::ChatClient> client) {
    if (!client) raise(Status::JudgeUnavailable, "no judge client configured");
    Judge j;
    j.client_ = std::move(client);
    return j;
}

namespace {

std::optional<int> parse_score(const std::string& reply) {
    // First integer token in range.
    for (size_t i = 0; i < reply.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
        size_t end = i;
        while (end < reply.size() && std::isdigit(static_cast<unsigned char>(reply[end])))
            ++end;
        int value = std::stoi(reply.substr(i, end - i));
        if (value >= 0 && value <= 10) return value;
        i = end;
    }
    return std::nullopt;
}

} // namespace

JudgeBand Judge::score(const std::string& generated, const std::string& reference) const {
    if (!client_) return fallback_judge_score(generated, reference);

    const std::string prompt = judge_prompt(generated, reference);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = client_->complete(prompt);
        if (auto value = parse_score(reply)) return JudgeBand{*value};
    }
    raise(Status::UnparseableJudgeReply, "judge returned no integer in 0..10 twice");
}

} // namespace seqdiag::eval
