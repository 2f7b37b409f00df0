#pragma once

#include "sim/signal.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqdiag::model {

/// Source of per-attempt text and image embeddings. Implementations must be
/// deterministic (equal inputs yield equal vectors) with fixed output
/// dimensions.
class EncoderProvider {
public:
    enum class Mode { pooled, raw };

    virtual ~EncoderProvider() = default;

    virtual std::vector<double> embed_text(const std::string& text) const = 0;
    virtual std::vector<double> embed_image(const std::string& draft_ref) const = 0;
    virtual int text_dim() const = 0;
    virtual int image_dim() const = 0;
    virtual Mode mode() const = 0;
};

/// Deterministic provider that hashes strings into pseudo-random unit
/// vectors. In pooled mode it additionally mixes in the planted direction of
/// any taxonomy name found in the input, perturbed by the noise tag the
/// simulator embeds in generated text; output is unit-norm. Raw mode applies
/// heavy per-dimension and per-input scale disparity on top, so modalities
/// arrive badly conditioned unless the model normalizes them.
class StubProvider : public EncoderProvider {
public:
    explicit StubProvider(uint64_t seed, Mode mode = Mode::pooled, int text_dim = 32,
                          int image_dim = 32);

    std::vector<double> embed_text(const std::string& text) const override;
    std::vector<double> embed_image(const std::string& draft_ref) const override;
    int text_dim() const override { return text_dim_; }
    int image_dim() const override { return image_dim_; }
    Mode mode() const override { return mode_; }

    const sim::DirectionBank& bank() const { return bank_; }

private:
    std::vector<double> pooled_text(const std::string& text) const;
    std::vector<double> raw_scale(std::vector<double> v, const std::string& key,
                                  double max_gain, uint64_t salt) const;

    uint64_t seed_;
    Mode mode_;
    int text_dim_;
    int image_dim_;
    sim::DirectionBank bank_;

    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::string, std::vector<double>> text_cache_;
    mutable std::unordered_map<std::string, std::vector<double>> image_cache_;
};

std::shared_ptr<EncoderProvider> make_stub_provider(uint64_t seed,
                                                    EncoderProvider::Mode mode,
                                                    int text_dim = 32,
                                                    int image_dim = 32);

} // namespace seqdiag::model
