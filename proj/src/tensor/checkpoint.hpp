#pragma once

#include "tensor/tensor.hpp"

#include <string>
#include <utility>
#include <vector>

namespace seqdiag::nn {

/// Flat binary container of named float64 tensors plus an embedded JSON
/// manifest of hyperparameters. Layout: magic, format version, manifest
/// length + UTF-8 bytes, tensor count, then per tensor: name length + bytes,
/// rows, cols, row-major little-endian float64 data.
struct Checkpoint {
    std::string manifest_json;
    std::vector<std::pair<std::string, Tensor>> tensors; // in saved order
};

void save_checkpoint(const std::string& path, const std::string& manifest_json,
                     const std::vector<std::pair<std::string, Tensor>>& tensors);

Checkpoint load_checkpoint(const std::string& path);

} // namespace seqdiag::nn
