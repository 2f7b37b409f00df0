#pragma once

#include "common/rng.hpp"

#include <cstdint>
#include <vector>

namespace seqdiag::curate {

struct ClusterAssignment {
    std::vector<int> labels;                    // per item, 0..k-1
    std::vector<std::vector<double>> centroids; // k vectors
    double inertia = 0.0;                       // sum of squared distances
    std::vector<double> inertia_history;        // one entry per Lloyd iteration
    int iterations = 0;
};

/// Lloyd's algorithm from k-means++ initialization with squared Euclidean
/// distance. Stops when the largest centroid shift falls below tol or after
/// max_iter iterations. Inertia is non-increasing across iterations; empty
/// clusters are repaired by taking the farthest point of the largest
/// cluster. Throws DegenerateInput when there are fewer distinct points
/// than k.
ClusterAssignment kmeans(const std::vector<std::vector<double>>& vectors, int k,
                         uint64_t seed, int max_iter = 100, double tol = 1e-6);

} // namespace seqdiag::curate
