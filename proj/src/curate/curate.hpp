#pragma once

#include "common/rng.hpp"
#include "core/taxonomy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqdiag::curate {

/// Draft-quality criterion points. Field maxima follow the grading rubric
/// weights (30/25/20/15/5/5).
struct RubricScores {
    int completeness = 0; // 0..30
    int layout = 0;       // 0..25
    int correctness = 0;  // 0..20
    int logic = 0;        // 0..15
    int units = 0;        // 0..5
    int calculation = 0;  // 0..5
};

/// Total rubric score in 0..100. Throws OutOfRange naming the offending field.
int score_draft(const RubricScores& s);

/// Indices of records whose score passes the cut. A score equal to the
/// threshold is kept; only scores strictly below it are excluded.
std::vector<size_t> filter_drafts(const std::vector<int>& scores, int threshold = 50);

/// Word-level 3-gram set of a lowercased, punctuation-stripped text.
std::vector<std::string> trigram_set(const std::string& text);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Greedy near-duplicate scan in input order: an item is dropped iff its
/// 3-gram set has Jaccard similarity >= threshold with any previously kept
/// item. Texts shorter than 3 tokens compare by normalized-string equality.
std::vector<size_t> dedup_3gram(const std::vector<std::string>& texts,
                                double jaccard_threshold = 0.8);

/// Uniform sample without replacement of min(per_cluster, cluster size)
/// items per cluster. Deterministic given seed; output sorted ascending.
std::vector<size_t> sample_balanced(const std::vector<int>& cluster_labels,
                                    int n_clusters, int per_cluster, uint64_t seed);

/// Uniform sample without replacement of min(per_category, count) items per
/// error type. Deterministic given seed; output sorted ascending.
std::vector<size_t> sample_per_category(const std::vector<ErrorLabel>& labels,
                                        int per_category, uint64_t seed);

} // namespace seqdiag::curate
