#pragma once

#include "common/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqdiag::sim {

/// Seeded bank of fixed pseudo-random unit directions, one per error type
/// and subtype. Both the cohort feature synthesizer and the stub encoder
/// provider draw from the same bank so that planted structure survives the
/// string round trip through generated records.
class DirectionBank {
public:
    DirectionBank(uint64_t seed, int text_dim, int image_dim);

    int text_dim() const { return text_dim_; }
    int image_dim() const { return image_dim_; }

    const std::vector<double>& type_text_direction(int type_id) const;
    /// Text direction of a subtype is shared across parents by local rank:
    /// it identifies "the r-th subtype of the active type", so subtype
    /// identity is only decodable jointly with the type.
    const std::vector<double>& subtype_text_direction(int subtype_id) const;
    const std::vector<double>& rank_text_direction(int local_rank) const;
    const std::vector<double>& subtype_image_direction(int subtype_id) const;

    /// Largest subtype count under one type.
    static constexpr int kMaxRank = 7;

private:
    int text_dim_;
    int image_dim_;
    std::vector<std::vector<double>> type_text_;
    std::vector<std::vector<double>> rank_text_;
    std::vector<std::vector<double>> sub_image_;
};

/// Unit vector derived deterministically from a string.
std::vector<double> hash_unit_vector(const std::string& s, int dim, uint64_t salt);

/// Gaussian vector (unscaled) derived deterministically from a seed.
std::vector<double> seeded_noise_vector(uint64_t seed, int dim);

/// Per-attempt feature-noise tag embedded in generated analysis text. The
/// encoder provider decodes it and perturbs planted directions accordingly,
/// which makes the feature noise level a property of the data itself.
struct NoiseMarker {
    double sigma = 0.0;
    uint64_t seed = 0;
};

std::string format_noise_marker(const NoiseMarker& m);
std::optional<NoiseMarker> parse_noise_marker(const std::string& text);

} // namespace seqdiag::sim
