#include "curate/curate.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <algorithm>
#include <unordered_set>

namespace seqdiag::curate {

namespace {

void check_range(const char* field, int value, int max) {
    if (value < 0 || value > max)
        raise(Status::OutOfRange, std::string(field) + " score " + std::to_string(value) +
                                      " outside 0.." + std::to_string(max));
}

} // namespace

int score_draft(const RubricScores& s) {
    check_range("completeness", s.completeness, 30);
    check_range("layout", s.layout, 25);
    check_range("correctness", s.correctness, 20);
    check_range("logic", s.logic, 15);
    check_range("units", s.units, 5);
    check_range("calculation", s.calculation, 5);
    return s.completeness + s.layout + s.correctness + s.logic + s.units + s.calculation;
}

std::vector<size_t> filter_drafts(const std::vector<int>& scores, int threshold) {
    std::vector<size_t> kept;
    for (size_t i = 0; i < scores.size(); ++i)
        if (scores[i] >= threshold) kept.push_back(i);
    return kept;
}

std::vector<std::string> trigram_set(const std::string& text) {
    std::vector<std::string> tokens = word_tokens(text);
    std::vector<std::string> grams;
    if (tokens.size() < 3) return grams;
    std::unordered_set<std::string> seen;
    for (size_t i = 0; i + 2 < tokens.size(); ++i) {
        std::string g = tokens[i] + " " + tokens[i + 1] + " " + tokens[i + 2];
        if (seen.insert(g).second) grams.push_back(std::move(g));
    }
    return grams;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    std::unordered_set<std::string> sa(a.begin(), a.end());
    size_t inter = 0;
    for (const std::string& g : b)
        if (sa.count(g)) ++inter;
    size_t uni = sa.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<size_t> dedup_3gram(const std::vector<std::string>& texts,
                                double jaccard_threshold) {
    if (jaccard_threshold < 0.0 || jaccard_threshold > 1.0)
        raise(Status::InvalidArgument, "jaccard_threshold must be in [0,1]");

    std::vector<size_t> kept;
    std::vector<std::vector<std::string>> kept_grams;
    std::vector<std::string> kept_short; // normalized short texts

    for (size_t i = 0; i < texts.size(); ++i) {
        std::vector<std::string> tokens = word_tokens(texts[i]);
        bool duplicate = false;
        if (tokens.size() < 3) {
            std::string key = normalize_whitespace(to_lower(texts[i]));
            duplicate = std::find(kept_short.begin(), kept_short.end(), key) !=
                        kept_short.end();
            if (!duplicate) {
                kept.push_back(i);
                kept_grams.emplace_back();
                kept_short.push_back(std::move(key));
            }
        } else {
            std::vector<std::string> grams = trigram_set(texts[i]);
            for (const auto& g : kept_grams) {
                if (!g.empty() && jaccard(g, grams) >= jaccard_threshold) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) {
                kept.push_back(i);
                kept_grams.push_back(std::move(grams));
            }
        }
    }
    return kept;
}

namespace {

std::vector<size_t> sample_group(std::vector<size_t>& members, size_t take, Rng& rng) {
    rng.shuffle(members);
    members.resize(std::min(take, members.size()));
    return members;
}

} // namespace

std::vector<size_t> sample_balanced(const std::vector<int>& cluster_labels,
                                    int n_clusters, int per_cluster, uint64_t seed) {
    if (per_cluster < 1) raise(Status::InvalidArgument, "per_cluster must be >= 1");
    if (n_clusters < 1) raise(Status::InvalidArgument, "n_clusters must be >= 1");

    std::vector<std::vector<size_t>> groups(static_cast<size_t>(n_clusters));
    for (size_t i = 0; i < cluster_labels.size(); ++i) {
        int c = cluster_labels[i];
        if (c < 0 || c >= n_clusters)
            raise(Status::InvalidArgument, "cluster label out of range: " + std::to_string(c));
        groups[static_cast<size_t>(c)].push_back(i);
    }

    Rng root(seed);
    std::vector<size_t> selected;
    for (size_t c = 0; c < groups.size(); ++c) {
        Rng rng = root.split(c + 1);
        auto taken = sample_group(groups[c], static_cast<size_t>(per_cluster), rng);
        selected.insert(selected.end(), taken.begin(), taken.end());
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

std::vector<size_t> sample_per_category(const std::vector<ErrorLabel>& labels,
                                        int per_category, uint64_t seed) {
    if (per_category < 1) raise(Status::InvalidArgument, "per_category must be >= 1");

    std::vector<std::vector<size_t>> groups(Taxonomy::kNumTypes);
    for (size_t i = 0; i < labels.size(); ++i)
        groups[static_cast<size_t>(labels[i].type_id)].push_back(i);

    Rng root(seed);
    std::vector<size_t> selected;
    for (size_t t = 0; t < groups.size(); ++t) {
        Rng rng = root.split(t + 1);
        auto taken = sample_group(groups[t], static_cast<size_t>(per_category), rng);
        selected.insert(selected.end(), taken.begin(), taken.end());
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

} // namespace seqdiag::curate
