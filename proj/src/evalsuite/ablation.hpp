#pragma once

#include "evalsuite/metrics.hpp"
#include "trainer/trainer.hpp"
#include "tsmodel/model.hpp"
#include "tsmodel/provider.hpp"

#include <string>
#include <vector>

namespace seqdiag::eval {

/// One design-grid cell: the base configuration with a single axis toggled.
struct AblationVariant {
    std::string group;
    std::string name;
    model::ModelConfig model_cfg;
    model::EncoderProvider::Mode provider_mode = model::EncoderProvider::Mode::pooled;
    int max_history = kMaxHistory; // 0 = no-sequence baseline
    bool use_class_weights = false;
};

struct AblationRow {
    std::string group;
    std::string variant;
    double acc1 = 0.0;
    double acc2 = 0.0;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

/// Known grids: baseline, modality, prenorm, typeweight, classifier,
/// pooling, all. The classifier grid emits individual / f_conditioned /
/// i_conditioned / teacher_force rows; the baseline grid pairs the
/// no-history condition with the full model.
std::vector<AblationVariant> make_grid(const std::string& grid_name,
                                       const model::ModelConfig& base);

/// Trains every variant on identical splits, windows, seeds, and epochs —
/// only the toggled axis differs — then evaluates on the shared test split.
std::vector<AblationRow> run_ablation(const std::vector<AblationVariant>& variants,
                                      const Dataset& dataset,
                                      const train::TrainConfig& train_cfg,
                                      uint64_t provider_seed, uint64_t model_seed);

std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);

} // namespace seqdiag::eval
