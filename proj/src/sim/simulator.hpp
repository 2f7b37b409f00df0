#pragma once

#include "common/rng.hpp"
#include "core/records.hpp"
#include "sim/signal.hpp"
#include "tsmodel/modal_features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqdiag::sim {

/// Per-student generative parameters. Probability vectors sum to 1.
struct StudentProfile {
    std::vector<double> base_propensity;                // over 9 types
    std::vector<std::vector<double>> subtype_propensity; // per type, over its subtypes
    double repeat_bias = 0.5;      // in [0,1]
    double correction_decay = 0.9; // in [0,1]
    double attempt_rate_days = 5.0;
};

struct CohortConfig {
    int n_students = 100;
    int min_attempts = 21;
    int max_attempts = 40;
    double zipf_s = 1.0; // long-tail exponent over type ranks
    uint64_t seed = 1;
    double gap_days_min = 1.0;
    double gap_days_max = 10.0;
    // Generative knobs beyond the required shape parameters.
    double repeat_bias = 0.5;
    double correction_decay = 0.9;
    double oversized_gap_prob = 0.02; // chance of a >30 day gap
    double feature_sigma = 0.05;      // noise level carried by attempt markers
    double subtype_concentration = 0.9; // mass on a student's preferred subtype

    void validate() const; // throws InvalidArgument
};

/// Mixture weight toward repeating the previous type:
/// repeat_bias * correction_decay^(consecutive trailing repeats).
double repeat_mixing_weight(const StudentProfile& profile,
                            const std::vector<ErrorLabel>& history);

/// Draw the next label: type from
/// (1-b) * base_propensity + b * onehot(last type), subtype from the
/// per-type propensity. Always parent-consistent.
ErrorLabel next_label(const StudentProfile& profile,
                      const std::vector<ErrorLabel>& history, Rng& rng);

StudentProfile sample_profile(const CohortConfig& cfg, Rng& rng);

/// Deterministic synthetic cohort with planted temporal and hierarchical
/// structure. Each student derives an independent sub-seed, so per-student
/// generation order does not matter.
Dataset sample_cohort(const CohortConfig& cfg);

/// Direct feature synthesis for oracle tests: text carries the type
/// direction, image the subtype direction, each plus Gaussian noise sigma.
class FeatureSynthesizer {
public:
    explicit FeatureSynthesizer(const DirectionBank& bank) : bank_(&bank) {}

    ModalFeatures synth(const ErrorLabel& label, int sequence_index,
                        double gap_days, double sigma, Rng& rng) const;

private:
    const DirectionBank* bank_;
};

} // namespace seqdiag::sim
