#pragma once

#include "core/records.hpp"
#include "tsmodel/features.hpp"
#include "tsmodel/model.hpp"

#include <cstdint>
#include <vector>

namespace seqdiag::train {

struct TrainConfig {
    double lr = 5e-4;
    int max_epochs = 40;
    int patience = 3;
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    int batch_size = 32;
    uint64_t seed = 0;
    // Adaptive-moment optimizer constants.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    // History truncation applied to eligible windows (0 = query only).
    int max_history = kMaxHistory;
    int64_t max_gap = kMaxGapSeconds;

    void validate() const;
};

struct DatasetSplit {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Student-granularity split: no student straddles splits. Deterministic
/// given seed; split sizes are within one student of the exact fractions.
/// Throws TooFewStudents if any split would be empty.
DatasetSplit split_dataset(const Dataset& dataset, double train_fraction,
                           double val_fraction, double test_fraction, uint64_t seed);

/// Every eligible window: each query index with at least one labeled prior
/// attempt, valid gaps throughout the window, and a labeled query.
std::vector<HistoryWindow> build_windows(const Dataset& dataset,
                                         int64_t max_gap = kMaxGapSeconds);

/// Drop all but the last max_history history attempts (0 clears history,
/// the no-sequence baseline condition).
void truncate_history(std::vector<HistoryWindow>& windows, int max_history);

/// A featurized window ready for the model.
struct Sample {
    std::vector<ModalFeatures> features;
    ErrorLabel truth;
};

std::vector<Sample> featurize_windows(const std::vector<HistoryWindow>& windows,
                                      const model::EncoderProvider& provider);

/// Inverse-frequency type weights over the training truths, normalized to
/// mean 1; types unseen in training get weight 1 before normalization.
std::vector<double> compute_class_weights(const std::vector<Sample>& train);

/// Patience rule on strict improvement of the running minimum validation
/// loss: stop once `patience` consecutive epochs fail to improve it.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience) : patience_(patience) {}

    /// Feed one epoch's validation loss; true means stop after this epoch.
    bool update(double val_loss);

    int best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_loss_; }

private:
    int patience_;
    int epoch_ = -1;
    int best_epoch_ = -1;
    double best_loss_ = 0.0;
    int stale_ = 0;
};

/// Adam over the model's parameter list. Gradients are read from the
/// tensors' grad buffers.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<nn::Tensor> params, double lr, double beta1,
                  double beta2, double eps);

    /// One update using current gradients, each scaled by grad_scale.
    void step(double grad_scale);

private:
    std::vector<nn::Tensor> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    double lr_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
};

struct EpochStats {
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc1 = 0.0;
    double val_acc2 = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = 0; // 1-based epoch whose parameters the model now holds
    double best_val_loss = 0.0;
};

/// Mini-batch training with per-epoch validation, the patience rule, and
/// restoration of the minimum-validation-loss parameters. Deterministic
/// given config and seeds. Throws NoValidWindows on an empty split.
TrainResult train_loop(model::TsModel& model, const TrainConfig& cfg,
                       const std::vector<Sample>& train_samples,
                       const std::vector<Sample>& val_samples);

} // namespace seqdiag::train
