#pragma once

#include <vector>

namespace seqdiag {

/// Per-attempt feature vectors for the three input modalities. Numeric
/// features are [normalized sequence position, normalized gap in days since
/// the previous attempt].
struct ModalFeatures {
    std::vector<double> image;
    std::vector<double> text;
    std::vector<double> numeric; // size 2
};

inline constexpr int kNumericDim = 2;

} // namespace seqdiag
