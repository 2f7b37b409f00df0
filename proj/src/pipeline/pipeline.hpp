#pragma once

#include "agents/orchestrate.hpp"
#include "core/records.hpp"
#include "curate/curate.hpp"
#include "evalsuite/ablation.hpp"
#include "sim/simulator.hpp"
#include "trainer/trainer.hpp"
#include "tsmodel/model.hpp"
#include "tsmodel/provider.hpp"

#include <cstdint>
#include <string>

namespace seqdiag::pipe {

struct ProviderConfig {
    uint64_t seed = 11;
    model::EncoderProvider::Mode mode = model::EncoderProvider::Mode::pooled;
    int d_txt = 32;
    int d_img = 32;

    std::shared_ptr<model::EncoderProvider> make() const;
    std::string to_json() const;
};

struct CurateConfig {
    int rubric_threshold = 50;
    double dedup_threshold = 0.8;
    int kmeans_k = 50;
    uint64_t kmeans_seed = 5;
    int per_cluster = 200;
    int per_category = 0; // 0 disables the per-category stage
    uint64_t sample_seed = 9;
    std::string scores_csv; // optional draft_ref-keyed criterion scores
};

struct AgentConfig {
    std::string client = "stub:follow_hint"; // stub:<policy>[:Type/Subtype] or http
    std::string client_url;
    std::string client_model = "gpt-4o";
    uint64_t seed = 13;
    std::string conditions = "both"; // both | with | without
    bool include_confidence = true;
    std::string judge = "fallback"; // fallback | http
    std::string transcript_path;
};

/// One parsed configuration bundle; every subcommand reads its section.
/// Unknown keys are rejected nowhere (forward compatible), missing keys keep
/// defaults.
struct PipelineConfig {
    sim::CohortConfig cohort;
    ProviderConfig provider;
    model::ModelConfig model;
    train::TrainConfig train;
    bool type_weight = false;    // derive class weights from the train split
    std::string test_split_out;  // write the held-out test students here
    CurateConfig curate;
    AgentConfig agent;
    std::string ablate_grid = "classifier";

    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_file(const std::string& path);
};

Dataset run_simulate(const PipelineConfig& cfg);

struct CurateResult {
    Dataset kept;
    std::string cluster_csv;
    std::string summary_json;
};
CurateResult run_curate(const Dataset& dataset, const PipelineConfig& cfg);

struct TrainOutput {
    std::string history_csv;
    std::string summary_json; // best epoch, losses, test metrics
};
TrainOutput run_train(const Dataset& dataset, const PipelineConfig& cfg,
                      const std::string& checkpoint_path);

struct EvalOutput {
    std::string csv;
    std::string table;
    std::string summary_json;
};
EvalOutput run_evaluate(const std::string& checkpoint_path, const Dataset& dataset);

struct AblateOutput {
    std::string csv;
    std::string table;
};
AblateOutput run_ablate(const Dataset& dataset, const PipelineConfig& cfg);

struct AgentEvalOutput {
    std::string csv;
    std::string table;
    std::string summary_json;
};
AgentEvalOutput run_agent_eval(const std::string& checkpoint_path,
                               const Dataset& dataset, const PipelineConfig& cfg);

std::string run_diagnose(const std::string& checkpoint_path, const Dataset& dataset,
                         const std::string& student_id, int attempt_index,
                         const PipelineConfig& cfg);

/// Offline rubric judge: deterministic criterion scores derived from the
/// attempt's draft reference and analysis text.
curate::RubricScores stub_rubric_scores(const AttemptRecord& attempt);

} // namespace seqdiag::pipe
