#include "common/error.hpp"
#include "evalsuite/judge.hpp"
#include "evalsuite/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqdiag;
using namespace seqdiag::eval;

TEST_CASE("accuracy is correct over total") {
    CHECK(accuracy({1, 2, 3, 4}, {1, 2, 3, 0}) == doctest::Approx(0.75));
    CHECK(accuracy({1, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(accuracy({}, {}), Error);
    CHECK_THROWS_AS(accuracy({1}, {1, 2}), Error);
}

TEST_CASE("macro average reproduces the published nine-category mean") {
    // Per-category accuracies from the strongest reference column.
    std::vector<double> per_type = {0.6373, 0.1889, 0.2471, 0.1181, 0.1312,
                                    0.0,    0.0964, 0.5315, 0.1176};
    double avg = macro_average(per_type);
    CHECK(std::fabs(avg - 0.2298) < 5e-5);
}

TEST_CASE("macro average ignores per-type sample counts") {
    const Taxonomy& tax = Taxonomy::instance();
    std::vector<ErrorLabel> predictions, truths;
    // Type 0: 1 of 2 correct. Type 7: 1 of 1 correct.
    predictions.push_back(tax.label_from_subtype(0));
    truths.push_back(tax.label_from_subtype(0));
    predictions.push_back(tax.label_from_subtype(22));
    truths.push_back(tax.label_from_subtype(0));
    predictions.push_back(tax.label_from_subtype(22));
    truths.push_back(tax.label_from_subtype(22));

    CategoryReport before = build_category_report(predictions, truths);

    // Duplicate the type-7 sample many times: macro stays put, Acc1 moves.
    for (int i = 0; i < 20; ++i) {
        predictions.push_back(tax.label_from_subtype(22));
        truths.push_back(tax.label_from_subtype(22));
    }
    CategoryReport after = build_category_report(predictions, truths);
    CHECK(before.macro_avg == doctest::Approx(after.macro_avg));
    CHECK(after.acc1 > before.acc1);
}

TEST_CASE("per-type accuracy conditions on the true type") {
    const Taxonomy& tax = Taxonomy::instance();
    std::vector<ErrorLabel> predictions = {tax.label_from_subtype(22),
                                           tax.label_from_subtype(0)};
    std::vector<ErrorLabel> truths = {tax.label_from_subtype(0),
                                      tax.label_from_subtype(0)};
    CategoryReport report = build_category_report(predictions, truths);
    CHECK(report.per_type_count[0] == 2);
    CHECK(report.per_type_accuracy[0] == doctest::Approx(0.5));
    CHECK(report.per_type_count[7] == 0);
    CHECK(report.acc1 == doctest::Approx(0.5));
}

TEST_CASE("fallback judge saturates on identical and disjoint texts") {
    CHECK(fallback_judge_score("same words here", "same words here").score == 10);
    CHECK(fallback_judge_score("alpha beta", "gamma delta").score == 0);
    CHECK(fallback_judge_score("", "").score == 10);
    CHECK(fallback_judge_score("something", "").score == 0);
}

TEST_CASE("fallback judge rounds token-overlap F1 half-up") {
    // precision 3/4 against recall 3/3: F1 = 6/7 ~ 0.857 -> 9.
    JudgeBand band = fallback_judge_score("add the numbers carefully",
                                          "carefully add numbers");
    CHECK(band.score == 9);
    CHECK(std::string(band.band()) == "fully correct");
}

TEST_CASE("fallback judge is symmetric and deterministic") {
    std::string a = "check the decimal point placement";
    std::string b = "the decimal place needs checking";
    CHECK(fallback_judge_score(a, b).score == fallback_judge_score(b, a).score);
    CHECK(fallback_judge_score(a, b).score == fallback_judge_score(a, b).score);
}

TEST_CASE("judge bands partition the 0..10 scale") {
    CHECK(std::string(JudgeBand{0}.band()) == "completely mismatched");
    CHECK(std::string(JudgeBand{2}.band()) == "completely mismatched");
    CHECK(std::string(JudgeBand{3}.band()) == "partially correct");
    CHECK(std::string(JudgeBand{5}.band()) == "partially correct");
    CHECK(std::string(JudgeBand{6}.band()) == "nearly correct");
    CHECK(std::string(JudgeBand{8}.band()) == "nearly correct");
    CHECK(std::string(JudgeBand{9}.band()) == "fully correct");
    CHECK(std::string(JudgeBand{10}.band()) == "fully correct");
}

namespace {

class ScriptedClient : public agents::ChatClient {
public:
    explicit ScriptedClient(std::vector<std::string> replies)
        : replies_(std::move(replies)) {}

    std::string complete(const std::string&) override {
        if (calls_ >= replies_.size()) return replies_.back();
        return replies_[calls_++];
    }
    std::string describe() const override { return "scripted"; }
    size_t calls() const { return calls_; }

private:
    std::vector<std::string> replies_;
    size_t calls_ = 0;
};

} // namespace

TEST_CASE("external judge parses the first in-range integer") {
    auto client = std::make_shared<ScriptedClient>(
        std::vector<std::string>{"Score: 7 (nearly correct)"});
    Judge judge = Judge::external(client);
    CHECK(judge.score("a", "b").score == 7);
}

TEST_CASE("external judge retries once then fails") {
    auto client = std::make_shared<ScriptedClient>(
        std::vector<std::string>{"no digits here", "still none"});
    Judge judge = Judge::external(client);
    try {
        judge.score("a", "b");
        FAIL("expected UnparseableJudgeReply");
    } catch (const Error& e) {
        CHECK(e.status() == Status::UnparseableJudgeReply);
        CHECK(client->calls() == 2);
    }

    auto recovers = std::make_shared<ScriptedClient>(
        std::vector<std::string>{"hmm", "I grade this 4 out of 10"});
    CHECK(Judge::external(recovers).score("a", "b").score == 4);
}

TEST_CASE("judge prompt carries the band rubric") {
    std::string prompt = judge_prompt("gen", "ref");
    CHECK(prompt.find("0-2") != std::string::npos);
    CHECK(prompt.find("3-5") != std::string::npos);
    CHECK(prompt.find("6-8") != std::string::npos);
    CHECK(prompt.find("9-10") != std::string::npos);
    CHECK(prompt.find("scale of 0 to 10") != std::string::npos);
}
