#include "sim/simulator.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <cmath>

namespace seqdiag::sim {

namespace {

constexpr double kPropensityConcentration = 120.0;
constexpr int64_t kEpochBase = 1600000000; // fixed origin for generated timestamps

double sample_gamma(Rng& rng, double alpha) {
    // Marsaglia-Tsang; boosted for alpha < 1.
    if (alpha < 1.0) {
        double u = rng.uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        return sample_gamma(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

std::vector<double> sample_dirichlet(Rng& rng, const std::vector<double>& alpha) {
    std::vector<double> v(alpha.size());
    double total = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        v[i] = sample_gamma(rng, alpha[i]);
        total += v[i];
    }
    for (double& x : v) x /= total;
    return v;
}

std::vector<double> zipf_weights(double s) {
    std::vector<double> w(Taxonomy::kNumTypes);
    double total = 0.0;
    for (int r = 0; r < Taxonomy::kNumTypes; ++r) {
        w[static_cast<size_t>(r)] = std::pow(static_cast<double>(r + 1), -s);
        total += w[static_cast<size_t>(r)];
    }
    for (double& x : w) x /= total;
    return w;
}

int trailing_run_length(const std::vector<ErrorLabel>& history) {
    if (history.empty()) return 0;
    int last = history.back().type_id;
    int run = 0;
    for (auto it = history.rbegin(); it != history.rend() && it->type_id == last; ++it)
        ++run;
    return run;
}

std::string two_digits(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

StudentTrajectory generate_trajectory(const CohortConfig& cfg,
                                      const std::string& student_id, Rng rng) {
    const Taxonomy& tax = Taxonomy::instance();
    StudentProfile profile = sample_profile(cfg, rng);

    StudentTrajectory traj;
    traj.student_id = student_id;

    int span = cfg.max_attempts - cfg.min_attempts + 1;
    int n_attempts =
        cfg.min_attempts + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(span)));
    int64_t timestamp =
        kEpochBase + static_cast<int64_t>(rng.uniform_int(365 * kSecondsPerDay));

    std::vector<ErrorLabel> labels;
    for (int i = 0; i < n_attempts; ++i) {
        if (i > 0) {
            double gap_days = rng.uniform() < cfg.oversized_gap_prob
                                  ? rng.uniform(31.0, 45.0)
                                  : rng.uniform(cfg.gap_days_min, cfg.gap_days_max);
            int64_t gap = static_cast<int64_t>(gap_days * kSecondsPerDay);
            timestamp += std::max<int64_t>(gap, 1);
        }
        ErrorLabel label = next_label(profile, labels, rng);
        labels.push_back(label);

        const std::string& type_name = tax.type(label.type_id).name;
        const ErrorSubtype& sub = tax.subtype(label.subtype_id);

        AttemptRecord a;
        a.student_id = student_id;
        a.timestamp = timestamp;
        int item = static_cast<int>(rng.uniform_int(900)) + 100;
        a.problem_text = "Worksheet item " + std::to_string(item) +
                         ": compute the required value and write the result.";
        int answer = static_cast<int>(rng.uniform_int(9000)) + 100;
        a.correct_answer = std::to_string(answer);
        a.student_answer = std::to_string(answer + 1 + static_cast<int>(rng.uniform_int(90)));
        NoiseMarker marker{cfg.feature_sigma, rng.next_u64()};
        a.analysis_text = "The item expects a single numeric result; intermediate "
                          "work appears on the draft. " +
                          format_noise_marker(marker);
        a.draft_ref = "draft://" + student_id + "/" + two_digits(i);
        a.label = label;
        a.reason_text = "The attempt shows " + sub.name + ": " + sub.definition +
                        " This falls under " + type_name + ".";
        a.suggestion_text = "Work through targeted exercises addressing " + sub.name +
                            " and re-check for " + type_name + " before submitting.";
        traj.attempts.push_back(std::move(a));
    }
    return traj;
}

} // namespace

void CohortConfig::validate() const {
    auto bad = [](const std::string& what) -> void {
        raise(Status::InvalidArgument, "invalid cohort config: " + what);
    };
    if (n_students < 1) bad("n_students must be >= 1");
    if (min_attempts < 1) bad("min_attempts must be >= 1");
    if (min_attempts > max_attempts) bad("min_attempts must be <= max_attempts");
    if (zipf_s < 0.0) bad("zipf_s must be >= 0");
    if (gap_days_min <= 0.0 || gap_days_min > gap_days_max)
        bad("gap_days_range must satisfy 0 < min <= max");
    if (repeat_bias < 0.0 || repeat_bias > 1.0) bad("repeat_bias must be in [0,1]");
    if (correction_decay < 0.0 || correction_decay > 1.0)
        bad("correction_decay must be in [0,1]");
    if (oversized_gap_prob < 0.0 || oversized_gap_prob > 1.0)
        bad("oversized_gap_prob must be in [0,1]");
    if (feature_sigma < 0.0) bad("feature_sigma must be >= 0");
    if (subtype_concentration < 0.0 || subtype_concentration > 1.0)
        bad("subtype_concentration must be in [0,1]");
}

double repeat_mixing_weight(const StudentProfile& profile,
                            const std::vector<ErrorLabel>& history) {
    int run = trailing_run_length(history);
    if (run == 0) return 0.0;
    return profile.repeat_bias * std::pow(profile.correction_decay, run - 1);
}

ErrorLabel next_label(const StudentProfile& profile,
                      const std::vector<ErrorLabel>& history, Rng& rng) {
    std::vector<double> probs = profile.base_propensity;
    double b = repeat_mixing_weight(profile, history);
    if (b > 0.0) {
        for (double& p : probs) p *= 1.0 - b;
        probs[static_cast<size_t>(history.back().type_id)] += b;
    }
    int type_id = static_cast<int>(rng.categorical(probs));
    int local =
        static_cast<int>(rng.categorical(profile.subtype_propensity[static_cast<size_t>(type_id)]));
    int subtype_id = Taxonomy::instance().subtypes_of(type_id)[static_cast<size_t>(local)];
    return Taxonomy::instance().make_label(type_id, subtype_id);
}

StudentProfile sample_profile(const CohortConfig& cfg, Rng& rng) {
    const Taxonomy& tax = Taxonomy::instance();
    StudentProfile p;
    std::vector<double> zipf = zipf_weights(cfg.zipf_s);
    std::vector<double> alpha(zipf.size());
    for (size_t i = 0; i < zipf.size(); ++i)
        alpha[i] = std::max(kPropensityConcentration * zipf[i], 0.05);
    p.base_propensity = sample_dirichlet(rng, alpha);

    for (int t = 0; t < Taxonomy::kNumTypes; ++t) {
        size_t k = tax.subtypes_of(t).size();
        size_t preferred = static_cast<size_t>(rng.uniform_int(k));
        std::vector<double> sub(k, (1.0 - cfg.subtype_concentration) / static_cast<double>(k));
        sub[preferred] += cfg.subtype_concentration;
        p.subtype_propensity.push_back(std::move(sub));
    }
    p.repeat_bias = cfg.repeat_bias;
    p.correction_decay = cfg.correction_decay;
    p.attempt_rate_days = 0.5 * (cfg.gap_days_min + cfg.gap_days_max);
    return p;
}

Dataset sample_cohort(const CohortConfig& cfg) {
    cfg.validate();
    Dataset cohort;
    cohort.reserve(static_cast<size_t>(cfg.n_students));
    Rng root(cfg.seed);
    for (int s = 0; s < cfg.n_students; ++s) {
        std::string student_id = "s" + std::to_string(100000 + s);
        cohort.push_back(generate_trajectory(cfg, student_id, root.split(static_cast<uint64_t>(s) + 1)));
    }
    return cohort;
}

ModalFeatures FeatureSynthesizer::synth(const ErrorLabel& label, int sequence_index,
                                        double gap_days, double sigma, Rng& rng) const {
    if (sigma < 0.0) raise(Status::InvalidArgument, "sigma must be >= 0");
    ModalFeatures f;
    f.text = bank_->type_text_direction(label.type_id);
    for (double& x : f.text) x += sigma * rng.gaussian();
    f.image = bank_->subtype_image_direction(label.subtype_id);
    for (double& x : f.image) x += sigma * rng.gaussian();
    f.numeric = {static_cast<double>(sequence_index) / kMaxHistory, gap_days / 30.0};
    return f;
}

} // namespace seqdiag::sim
