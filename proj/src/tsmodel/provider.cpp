#include "tsmodel/provider.hpp"

#include "common/error.hpp"
#include "common/text.hpp"
#include "core/taxonomy.hpp"

#include <cmath>

namespace seqdiag::model {

namespace {

constexpr double kBaseWeight = 0.25; // content hash contribution in pooled mode
constexpr double kDirWeight = 1.0;   // planted direction contribution

constexpr uint64_t kTextSalt = 0x7478745F73616C74ULL;
constexpr uint64_t kImageSalt = 0x696D675F73616C74ULL;
constexpr uint64_t kGainSalt = 0x6761696E5F73616CULL;

void normalize(std::vector<double>& v) {
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq <= 0.0) return;
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
}

} // namespace

StubProvider::StubProvider(uint64_t seed, Mode mode, int text_dim, int image_dim)
    : seed_(seed), mode_(mode), text_dim_(text_dim), image_dim_(image_dim),
      bank_(seed, text_dim, image_dim) {
    if (text_dim < 2 || image_dim < 2)
        raise(Status::InvalidArgument, "provider dimensions must be >= 2");
}

std::vector<double> StubProvider::pooled_text(const std::string& text) const {
    std::vector<double> v = sim::hash_unit_vector(text, text_dim_, seed_ ^ kTextSalt);
    for (double& x : v) x *= kBaseWeight;

    const Taxonomy& tax = Taxonomy::instance();
    const std::string lowered = to_lower(text);
    for (const ErrorType& t : tax.types()) {
        if (!contains(lowered, to_lower(t.name))) continue;
        const auto& dir = bank_.type_text_direction(t.id);
        for (int i = 0; i < text_dim_; ++i) v[static_cast<size_t>(i)] += kDirWeight * dir[static_cast<size_t>(i)];
    }
    for (const ErrorSubtype& s : tax.subtypes()) {
        if (!contains(lowered, to_lower(s.name))) continue;
        const auto& dir = bank_.subtype_text_direction(s.id);
        for (int i = 0; i < text_dim_; ++i) v[static_cast<size_t>(i)] += kDirWeight * dir[static_cast<size_t>(i)];
    }

    if (auto marker = sim::parse_noise_marker(text); marker && marker->sigma > 0.0) {
        std::vector<double> noise = sim::seeded_noise_vector(marker->seed, text_dim_);
        for (int i = 0; i < text_dim_; ++i)
            v[static_cast<size_t>(i)] += marker->sigma * noise[static_cast<size_t>(i)];
    }

    normalize(v);
    return v;
}

std::vector<double> StubProvider::raw_scale(std::vector<double> v, const std::string& key,
                                            double max_gain, uint64_t salt) const {
    // Fixed per-dimension disparity: the first half of the dimensions carry
    // a 100x larger scale than the second half.
    const int d = static_cast<int>(v.size());
    for (int i = 0; i < d; ++i)
        v[static_cast<size_t>(i)] *= (i < d / 2) ? 10.0 : 0.1;
    // Per-input gain in [1, max_gain], derived from the content hash.
    Rng rng(fnv1a64(key) ^ salt ^ seed_);
    double gain = std::exp(rng.uniform() * std::log(max_gain));
    for (double& x : v) x *= gain;
    return v;
}

std::vector<double> StubProvider::embed_text(const std::string& text) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = text_cache_.find(text);
        if (it != text_cache_.end()) return it->second;
    }
    std::vector<double> v = pooled_text(text);
    if (mode_ == Mode::raw) v = raw_scale(std::move(v), text, 10.0, kGainSalt);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        text_cache_.emplace(text, v);
    }
    return v;
}

std::vector<double> StubProvider::embed_image(const std::string& draft_ref) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = image_cache_.find(draft_ref);
        if (it != image_cache_.end()) return it->second;
    }
    std::vector<double> v = sim::hash_unit_vector(draft_ref, image_dim_, seed_ ^ kImageSalt);
    if (mode_ == Mode::raw) v = raw_scale(std::move(v), draft_ref, 100.0, kGainSalt);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        image_cache_.emplace(draft_ref, v);
    }
    return v;
}

std::shared_ptr<EncoderProvider> make_stub_provider(uint64_t seed,
                                                    EncoderProvider::Mode mode,
                                                    int text_dim, int image_dim) {
    return std::make_shared<StubProvider>(seed, mode, text_dim, image_dim);
}

} // namespace seqdiag::model
