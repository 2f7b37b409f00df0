#include "curate/kmeans.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace seqdiag::curate {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

size_t count_distinct(const std::vector<std::vector<double>>& vectors) {
    std::unordered_set<std::string> seen;
    for (const auto& v : vectors) {
        std::string key(reinterpret_cast<const char*>(v.data()),
                        v.size() * sizeof(double));
        seen.insert(std::move(key));
    }
    return seen.size();
}

// k-means++: first centroid uniform, the rest proportional to squared
// distance from the nearest chosen centroid.
std::vector<std::vector<double>> seed_centroids(
    const std::vector<std::vector<double>>& vectors, int k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.push_back(vectors[rng.uniform_int(vectors.size())]);
    std::vector<double> best(vectors.size(), std::numeric_limits<double>::max());
    while (static_cast<int>(centroids.size()) < k) {
        for (size_t i = 0; i < vectors.size(); ++i)
            best[i] = std::min(best[i], sq_dist(vectors[i], centroids.back()));
        double total = 0.0;
        for (double d : best) total += d;
        size_t pick;
        if (total <= 0.0) {
            pick = rng.uniform_int(vectors.size());
        } else {
            double u = rng.uniform() * total;
            double acc = 0.0;
            pick = vectors.size() - 1;
            for (size_t i = 0; i < vectors.size(); ++i) {
                acc += best[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(vectors[pick]);
    }
    return centroids;
}

// Nearest-centroid assignment with empty-cluster repair: each empty cluster
// is re-seeded with the farthest point of the largest cluster. Returns the
// resulting inertia.
double assign_step(const std::vector<std::vector<double>>& vectors, int k,
                   std::vector<std::vector<double>>& centroids,
                   std::vector<int>& labels, std::vector<size_t>& counts) {
    counts.assign(static_cast<size_t>(k), 0);
    for (size_t i = 0; i < vectors.size(); ++i) {
        int best_c = 0;
        double best_d = std::numeric_limits<double>::max();
        for (int c = 0; c < k; ++c) {
            double d = sq_dist(vectors[i], centroids[static_cast<size_t>(c)]);
            if (d < best_d) {
                best_d = d;
                best_c = c;
            }
        }
        labels[i] = best_c;
        ++counts[static_cast<size_t>(best_c)];
    }

    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] > 0) continue;
        size_t largest = static_cast<size_t>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        size_t far_idx = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < vectors.size(); ++i) {
            if (labels[i] != static_cast<int>(largest)) continue;
            double d = sq_dist(vectors[i], centroids[largest]);
            if (d > far_d) {
                far_d = d;
                far_idx = i;
            }
        }
        labels[far_idx] = c;
        centroids[static_cast<size_t>(c)] = vectors[far_idx];
        --counts[largest];
        ++counts[static_cast<size_t>(c)];
    }

    double inertia = 0.0;
    for (size_t i = 0; i < vectors.size(); ++i)
        inertia += sq_dist(vectors[i], centroids[static_cast<size_t>(labels[i])]);
    return inertia;
}

} // namespace

ClusterAssignment kmeans(const std::vector<std::vector<double>>& vectors, int k,
                         uint64_t seed, int max_iter, double tol) {
    if (k < 1) raise(Status::InvalidArgument, "k must be >= 1");
    if (vectors.size() < static_cast<size_t>(k))
        raise(Status::InvalidArgument, "need at least k vectors");
    const size_t dim = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != dim)
            raise(Status::ShapeMismatch, "vector dims differ: " + std::to_string(dim) +
                                             " vs " + std::to_string(v.size()));
    if (count_distinct(vectors) < static_cast<size_t>(k))
        raise(Status::DegenerateInput, "fewer distinct points than k");

    Rng rng(seed);
    ClusterAssignment result;
    result.centroids = seed_centroids(vectors, k, rng);
    result.labels.assign(vectors.size(), 0);

    std::vector<size_t> counts;
    double prev_inertia = std::numeric_limits<double>::max();
    for (int iter = 0; iter < max_iter; ++iter) {
        double inertia = assign_step(vectors, k, result.centroids, result.labels, counts);
        if (inertia > prev_inertia + 1e-9)
            raise(Status::Internal, "k-means inertia increased across iterations");
        result.inertia_history.push_back(inertia);
        result.inertia = inertia;
        prev_inertia = inertia;
        result.iterations = iter + 1;

        // Update step: centroids become cluster means.
        std::vector<std::vector<double>> next(static_cast<size_t>(k),
                                              std::vector<double>(dim, 0.0));
        for (size_t i = 0; i < vectors.size(); ++i) {
            auto& acc = next[static_cast<size_t>(result.labels[i])];
            for (size_t d = 0; d < dim; ++d) acc[d] += vectors[i][d];
        }
        double max_shift = 0.0;
        for (int c = 0; c < k; ++c) {
            auto& centroid = next[static_cast<size_t>(c)];
            for (size_t d = 0; d < dim; ++d)
                centroid[d] /= static_cast<double>(counts[static_cast<size_t>(c)]);
            max_shift = std::max(
                max_shift,
                std::sqrt(sq_dist(centroid, result.centroids[static_cast<size_t>(c)])));
        }
        result.centroids = std::move(next);
        if (max_shift < tol) break;
    }

    // Sync labels with the converged centroids.
    double final_inertia = assign_step(vectors, k, result.centroids, result.labels, counts);
    result.inertia = final_inertia;
    return result;
}

} // namespace seqdiag::curate
