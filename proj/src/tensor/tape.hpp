#pragma once

#include "tensor/tensor.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace seqdiag::nn {

/// Reverse-mode autodiff tape. Forward values are computed eagerly; each
/// primitive pushes one backward closure that accumulates exact analytic
/// gradients into its inputs' grad buffers. backward() visits the closures
/// in reverse execution order exactly once. A tape is single-threaded;
/// distinct tapes are independent.
class Tape {
public:
    /// (m,k) x (k,n) -> (m,n)
    Tensor matmul(const Tensor& a, const Tensor& b);

    /// Elementwise sum, identical shapes.
    Tensor add(const Tensor& a, const Tensor& b);

    /// Elementwise product, identical shapes.
    Tensor mul(const Tensor& a, const Tensor& b);

    /// (m,n) + broadcast (1,n) row.
    Tensor add_bias(const Tensor& a, const Tensor& bias);

    Tensor scale(const Tensor& a, double factor);

    /// Horizontal concatenation: (m,na) | (m,nb) -> (m,na+nb).
    Tensor concat_cols(const Tensor& a, const Tensor& b);

    /// Mean over axis 0: (m,n) -> (1,n).
    Tensor mean_rows(const Tensor& a);

    /// Row-wise layer normalization with learned affine. gamma and beta are
    /// (1,n). A constant row maps to beta exactly (the eps path).
    Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                      double eps = 1e-5);

    /// Exact erf-form GELU (not the tanh approximation).
    Tensor gelu(const Tensor& x);

    /// Row-wise softmax; each output row sums to 1.
    Tensor softmax_rows(const Tensor& x);

    /// softmax(Q Kᵀ / sqrt(dk)) V with optional causal mask.
    /// Q,K are (t,dk), V is (t,dv).
    Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                bool causal_mask = false);

    /// Negative log-likelihood of target under softmax(logits), logits (1,c).
    /// With class_weights (1,c) the loss is weights[target] * nll.
    Tensor cross_entropy(const Tensor& logits, int target,
                         const std::optional<Tensor>& class_weights = std::nullopt);

    Tensor slice_rows(const Tensor& a, int64_t begin, int64_t end);
    Tensor slice_cols(const Tensor& a, int64_t begin, int64_t end);

    /// Stack n (1,d) rows into an (n,d) matrix.
    Tensor stack_rows(const std::vector<Tensor>& rows);

    /// Seed d(loss)/d(loss)=1 and run all recorded closures in reverse.
    void backward(Tensor loss);

    size_t node_count() const { return nodes_.size(); }

private:
    void record(std::function<void()> fn) { nodes_.push_back(std::move(fn)); }

    std::vector<std::function<void()>> nodes_;
};

} // namespace seqdiag::nn
