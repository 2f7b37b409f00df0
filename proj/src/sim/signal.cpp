#include "sim/signal.hpp"

#include "common/error.hpp"
#include "core/taxonomy.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace seqdiag::sim {

namespace {

std::vector<double> random_unit_vector(Rng& rng, int dim) {
    std::vector<double> v(static_cast<size_t>(dim));
    double norm_sq = 0.0;
    for (double& x : v) {
        x = rng.gaussian();
        norm_sq += x * x;
    }
    double inv = 1.0 / std::sqrt(norm_sq > 0 ? norm_sq : 1.0);
    for (double& x : v) x *= inv;
    return v;
}

} // namespace

DirectionBank::DirectionBank(uint64_t seed, int text_dim, int image_dim)
    : text_dim_(text_dim), image_dim_(image_dim) {
    if (text_dim < 1 || image_dim < 1)
        raise(Status::InvalidArgument, "direction bank dimensions must be positive");
    Rng type_rng = Rng(seed).split(1);
    Rng rank_rng = Rng(seed).split(2);
    Rng sub_image_rng = Rng(seed).split(3);
    for (int t = 0; t < Taxonomy::kNumTypes; ++t)
        type_text_.push_back(random_unit_vector(type_rng, text_dim));
    for (int r = 0; r < kMaxRank; ++r)
        rank_text_.push_back(random_unit_vector(rank_rng, text_dim));
    for (int s = 0; s < Taxonomy::kNumSubtypes; ++s)
        sub_image_.push_back(random_unit_vector(sub_image_rng, image_dim));
}

const std::vector<double>& DirectionBank::type_text_direction(int type_id) const {
    Taxonomy::instance().type(type_id); // range check
    return type_text_[static_cast<size_t>(type_id)];
}

const std::vector<double>& DirectionBank::rank_text_direction(int local_rank) const {
    if (local_rank < 0 || local_rank >= kMaxRank)
        raise(Status::InvalidArgument, "rank out of range: " + std::to_string(local_rank));
    return rank_text_[static_cast<size_t>(local_rank)];
}

const std::vector<double>& DirectionBank::subtype_text_direction(int subtype_id) const {
    const Taxonomy& tax = Taxonomy::instance();
    return rank_text_direction(tax.local_index(subtype_id));
}

const std::vector<double>& DirectionBank::subtype_image_direction(int subtype_id) const {
    Taxonomy::instance().subtype(subtype_id);
    return sub_image_[static_cast<size_t>(subtype_id)];
}

std::vector<double> hash_unit_vector(const std::string& s, int dim, uint64_t salt) {
    Rng rng(fnv1a64(s) ^ salt);
    return random_unit_vector(rng, dim);
}

std::vector<double> seeded_noise_vector(uint64_t seed, int dim) {
    Rng rng(seed);
    std::vector<double> v(static_cast<size_t>(dim));
    for (double& x : v) x = rng.gaussian();
    return v;
}

std::string format_noise_marker(const NoiseMarker& m) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "[ns:%.6f:%016llx]", m.sigma,
                  static_cast<unsigned long long>(m.seed));
    return buf;
}

std::optional<NoiseMarker> parse_noise_marker(const std::string& text) {
    size_t pos = text.find("[ns:");
    if (pos == std::string::npos) return std::nullopt;
    double sigma = 0.0;
    unsigned long long seed = 0;
    if (std::sscanf(text.c_str() + pos, "[ns:%lf:%16llx]", &sigma, &seed) != 2)
        return std::nullopt;
    if (sigma < 0.0) return std::nullopt;
    return NoiseMarker{sigma, static_cast<uint64_t>(seed)};
}

} // namespace seqdiag::sim
