#pragma once

#include "core/taxonomy.hpp"
#include "tensor/checkpoint.hpp"
#include "tensor/tape.hpp"
#include "tsmodel/modal_features.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqdiag::model {

enum class Pooling { last, mean, cls, mean_cls };
enum class HeadMode { individual, f_conditioned, i_conditioned };

const char* pooling_name(Pooling p);
const char* head_mode_name(HeadMode m);
Pooling pooling_from_name(const std::string& name);
HeadMode head_mode_from_name(const std::string& name);

struct ModelConfig {
    int d_model = 32;
    int n_layers = 2;
    int n_heads = 4;
    int d_mlp = 64;
    int d_txt = 32;
    int d_img = 32;
    int d_num = kNumericDim;
    Pooling pooling = Pooling::mean_cls;
    HeadMode head_mode = HeadMode::i_conditioned;
    // Routes the subtype head by the true type during training (inference
    // always routes by the predicted type). Only meaningful for
    // i_conditioned; other head modes have a single subtype head.
    bool teacher_forcing = true;
    bool pre_norm = true;
    std::optional<std::vector<double>> class_weights; // 9 entries

    void validate() const;
    int pooled_dim() const {
        return pooling == Pooling::mean_cls ? 2 * d_model : d_model;
    }

    std::string to_json() const;
    static ModelConfig from_json(const std::string& json_text);
};

/// Longest token sequence: 20 history + 1 query + 1 [CLS].
inline constexpr int kMaxTokens = 21;
inline constexpr int kPositionSlots = kMaxTokens + 1;

struct LossBreakdown {
    double total = 0.0;
    double type_loss = 0.0;
    double subtype_loss = 0.0;
};

struct Prediction {
    int type_id = 0;
    int subtype_id = 0;
    std::vector<double> type_probs;    // 9
    std::vector<double> subtype_probs; // over the activated head
    double confidence = 0.0;           // max type probability
};

/// The sequential classifier: modality-specific pre-norm + linear alignment
/// into d_model, learned [CLS] and positional embeddings, a pre-norm
/// transformer trunk, configurable pooling, and hierarchical type/subtype
/// heads. Parameters are read-only during inference; training mutates them
/// through the tape's gradient buffers.
class TsModel {
public:
    TsModel(ModelConfig cfg, uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }

    /// All learnable tensors, in a fixed order (shared buffers).
    const std::vector<std::pair<std::string, nn::Tensor>>& named_params() const {
        return params_;
    }

    /// Modality-normalized (when pre_norm) linear fusion of one attempt's
    /// features into a (1, d_model) token.
    nn::Tensor align(nn::Tape& tape, const ModalFeatures& f) const;

    /// Full trunk over a window's features; returns the pooled classifier
    /// input of width pooled_dim(). Throws SequenceTooLong past 21 attempts.
    nn::Tensor forward(nn::Tape& tape, const std::vector<ModalFeatures>& window) const;

    struct LossResult {
        nn::Tensor total; // scalar on the tape
        LossBreakdown breakdown;
    };

    /// Type cross-entropy plus the mode-dependent subtype term.
    LossResult heads_loss(nn::Tape& tape, const nn::Tensor& pooled,
                          const ErrorLabel& truth) const;

    Prediction predict(nn::Tape& tape, const nn::Tensor& pooled) const;

    /// Convenience: forward + predict on a private tape.
    Prediction predict(const std::vector<ModalFeatures>& window) const;

    void zero_grads() const;

    /// Deep-copied parameter values, and restore.
    std::vector<std::vector<double>> snapshot_values() const;
    void restore_values(const std::vector<std::vector<double>>& snapshot) const;

    void save(const std::string& path, const std::string& manifest_json) const;

    /// Rebuild a model from a checkpoint produced by save(); the manifest's
    /// "model" object must hold the config.
    static TsModel load(const std::string& path, std::string* manifest_json_out = nullptr);

private:
    explicit TsModel(ModelConfig cfg); // allocates zeroed parameters

    const nn::Tensor& param(const std::string& name) const;

    ModelConfig cfg_;
    std::vector<std::pair<std::string, nn::Tensor>> params_;
    std::unordered_map<std::string, size_t> param_index_;
};

} // namespace seqdiag::model
