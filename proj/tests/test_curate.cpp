#include "common/error.hpp"
#include "common/rng.hpp"
#include "curate/curate.hpp"
#include "curate/kmeans.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace seqdiag;
using namespace seqdiag::curate;

TEST_CASE("score_draft sums the six criterion scores") {
    CHECK(score_draft({30, 25, 20, 15, 5, 5}) == 100);
    CHECK(score_draft({20, 18, 15, 10, 4, 4}) == 71);
    CHECK(score_draft({10, 10, 10, 10, 2, 2}) == 44);
    CHECK(score_draft({0, 0, 0, 0, 0, 0}) == 0);
}

TEST_CASE("score_draft rejects out-of-range criterion values") {
    CHECK_THROWS_AS(score_draft({31, 0, 0, 0, 0, 0}), Error);
    CHECK_THROWS_AS(score_draft({0, 26, 0, 0, 0, 0}), Error);
    CHECK_THROWS_AS(score_draft({0, 0, 0, 0, 6, 0}), Error);
    CHECK_THROWS_AS(score_draft({0, 0, -1, 0, 0, 0}), Error);
    try {
        score_draft({31, 0, 0, 0, 0, 0});
    } catch (const Error& e) {
        CHECK(e.status() == Status::OutOfRange);
    }
}

TEST_CASE("score_draft is monotone in every criterion") {
    RubricScores base{10, 10, 10, 5, 2, 2};
    int reference = score_draft(base);
    RubricScores bumped = base;
    bumped.completeness += 1;
    CHECK(score_draft(bumped) > reference);
    bumped = base;
    bumped.calculation += 1;
    CHECK(score_draft(bumped) > reference);
}

TEST_CASE("filter_drafts keeps a score equal to the threshold") {
    std::vector<int> scores = {44, 50, 71};
    std::vector<size_t> kept = filter_drafts(scores, 50);
    CHECK(kept == std::vector<size_t>{1, 2});

    CHECK(filter_drafts({10, 20}, 50).empty());
    CHECK(filter_drafts({10, 20}, 0).size() == 2);
}

TEST_CASE("dedup drops exact duplicates and keeps near misses") {
    // Oracle: "the cat sat on the mat" has 3-grams {the cat sat, cat sat on,
    // sat on the, on the mat}; the variant swaps the last two for
    // {sat on a, on a mat}. Intersection 2, union 6, Jaccard 1/3 < 0.8.
    std::vector<std::string> texts = {"the cat sat on the mat",
                                      "the cat sat on the mat",
                                      "the cat sat on a mat"};
    std::vector<size_t> kept = dedup_3gram(texts, 0.8);
    CHECK(kept == std::vector<size_t>{0, 2});

    auto a = trigram_set(texts[0]);
    auto b = trigram_set(texts[2]);
    CHECK(jaccard(a, b) == doctest::Approx(2.0 / 6.0));

    CHECK(dedup_3gram({}, 0.8).empty());
}

TEST_CASE("texts with fewer than 3 tokens compare by normalized equality") {
    std::vector<std::string> texts = {"apply  formula", "apply formula", "APPLY formula",
                                      "other words"};
    std::vector<size_t> kept = dedup_3gram(texts, 0.8);
    CHECK(kept == std::vector<size_t>{0, 3});
}

TEST_CASE("dedup is idempotent") {
    std::vector<std::string> texts;
    Rng rng(5);
    const std::vector<std::string> vocabulary = {"add", "the", "sum", "of", "all",
                                                 "terms", "then", "simplify", "result"};
    for (int i = 0; i < 60; ++i) {
        std::string t;
        for (int w = 0; w < 6; ++w)
            t += vocabulary[rng.uniform_int(vocabulary.size())] + " ";
        texts.push_back(t);
    }
    std::vector<size_t> once = dedup_3gram(texts, 0.6);
    std::vector<std::string> survivors;
    for (size_t idx : once) survivors.push_back(texts[idx]);
    std::vector<size_t> twice = dedup_3gram(survivors, 0.6);
    CHECK(twice.size() == survivors.size());
    for (size_t i = 0; i < twice.size(); ++i) CHECK(twice[i] == i);
}

TEST_CASE("k=1 produces the mean centroid") {
    std::vector<std::vector<double>> points = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
    ClusterAssignment a = kmeans(points, 1, 3);
    REQUIRE(a.centroids.size() == 1);
    CHECK(a.centroids[0][0] == doctest::Approx(1.0));
    CHECK(a.centroids[0][1] == doctest::Approx(1.0));
    CHECK(a.inertia == doctest::Approx(8.0));
}

TEST_CASE("k=2 matches the brute-force optimal 2-partition") {
    std::vector<std::vector<double>> points = {{0, 0}, {0, 1}, {10, 10}, {10, 11}};

    // Oracle: enumerate every 2-partition, score by inertia against cluster
    // means, and take the minimum.
    double best_inertia = 1e18;
    std::vector<int> best_labels;
    for (int mask = 1; mask < 15; ++mask) { // skip empty/full assignments
        std::vector<std::vector<double>> sum(2, {0.0, 0.0});
        std::vector<int> count(2, 0);
        for (int i = 0; i < 4; ++i) {
            int c = (mask >> i) & 1;
            sum[c][0] += points[static_cast<size_t>(i)][0];
            sum[c][1] += points[static_cast<size_t>(i)][1];
            ++count[c];
        }
        if (count[0] == 0 || count[1] == 0) continue;
        double inertia = 0.0;
        for (int i = 0; i < 4; ++i) {
            int c = (mask >> i) & 1;
            double dx = points[static_cast<size_t>(i)][0] - sum[c][0] / count[c];
            double dy = points[static_cast<size_t>(i)][1] - sum[c][1] / count[c];
            inertia += dx * dx + dy * dy;
        }
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_labels.assign(4, 0);
            for (int i = 0; i < 4; ++i) best_labels[static_cast<size_t>(i)] = (mask >> i) & 1;
        }
    }

    ClusterAssignment a = kmeans(points, 2, 7);
    CHECK(a.inertia == doctest::Approx(best_inertia));
    CHECK(a.labels[0] == a.labels[1]);
    CHECK(a.labels[2] == a.labels[3]);
    CHECK(a.labels[0] != a.labels[2]);
}

TEST_CASE("kmeans is deterministic and its inertia never increases") {
    Rng rng(11);
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 120; ++i)
        points.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});

    ClusterAssignment a = kmeans(points, 5, 99);
    ClusterAssignment b = kmeans(points, 5, 99);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
    for (size_t i = 1; i < a.inertia_history.size(); ++i)
        CHECK(a.inertia_history[i] <= a.inertia_history[i - 1] + 1e-9);
}

TEST_CASE("kmeans final assignment is a fixed point of assign-then-update") {
    std::vector<std::vector<double>> points = {{0, 0}, {0, 1}, {1, 0},
                                               {9, 9}, {9, 10}, {10, 9}};
    ClusterAssignment a = kmeans(points, 2, 1);
    // Reassign against the final centroids; nothing should move.
    for (size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d = 1e18;
        for (int c = 0; c < 2; ++c) {
            double d = 0.0;
            for (size_t j = 0; j < points[i].size(); ++j) {
                double diff = points[i][j] - a.centroids[static_cast<size_t>(c)][j];
                d += diff * diff;
            }
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        CHECK(best == a.labels[i]);
    }
}

TEST_CASE("kmeans rejects fewer distinct points than k") {
    std::vector<std::vector<double>> points = {{1, 1}, {1, 1}, {1, 1}};
    try {
        kmeans(points, 2, 5);
        FAIL("expected DegenerateInput");
    } catch (const Error& e) {
        CHECK(e.status() == Status::DegenerateInput);
    }
}

TEST_CASE("sample_balanced draws min(per_cluster, size) from each cluster") {
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < (c == 2 ? 3 : 10); ++i) labels.push_back(c);

    std::vector<size_t> picked = sample_balanced(labels, 3, 5, 4);
    CHECK(picked.size() == 5 + 5 + 3);
    std::set<size_t> unique_picked(picked.begin(), picked.end());
    CHECK(unique_picked.size() == picked.size()); // without replacement

    CHECK(sample_balanced(labels, 3, 5, 4) == picked); // deterministic
    CHECK(sample_balanced(labels, 3, 1, 4).size() == 3);
}

TEST_CASE("sample_per_category caps at availability") {
    const Taxonomy& tax = Taxonomy::instance();
    std::vector<ErrorLabel> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(tax.label_from_subtype(22)); // type 7
    for (int i = 0; i < 17; ++i) labels.push_back(tax.label_from_subtype(0));  // type 0

    std::vector<size_t> picked = sample_per_category(labels, 100, 6);
    CHECK(picked.size() == 40 + 17);
    picked = sample_per_category(labels, 10, 6);
    CHECK(picked.size() == 20);
    CHECK_THROWS_AS(sample_per_category(labels, 0, 6), Error);
}
