#include "tensor/tape.hpp"

#include "common/error.hpp"

#include <cmath>

namespace seqdiag::nn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        raise(Status::ShapeMismatch,
              std::string(op) + ": " + a.shape_str() + " vs " + b.shape_str());
}

// Row-wise softmax of a raw buffer, numerically stabilized.
void softmax_inplace(std::vector<double>& v, int64_t rows, int64_t cols) {
    for (int64_t i = 0; i < rows; ++i) {
        double* row = v.data() + i * cols;
        double m = row[0];
        for (int64_t j = 1; j < cols; ++j) m = std::max(m, row[j]);
        double sum = 0.0;
        for (int64_t j = 0; j < cols; ++j) {
            row[j] = std::exp(row[j] - m);
            sum += row[j];
        }
        for (int64_t j = 0; j < cols; ++j) row[j] /= sum;
    }
}

} // namespace

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        raise(Status::ShapeMismatch,
              "matmul: " + a.shape_str() + " x " + b.shape_str());
    const int64_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor out = Tensor::zeros(m, n);
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (int64_t i = 0; i < m; ++i)
        for (int64_t p = 0; p < k; ++p) {
            double aip = av[static_cast<size_t>(i * k + p)];
            if (aip == 0.0) continue;
            const double* brow = bv.data() + p * n;
            double* orow = ov.data() + i * n;
            for (int64_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
        }

    record([a = a, b = b, out = out]() mutable {
        const auto& g = out.grad();
        const int64_t m = a.rows(), k = a.cols(), n = b.cols();
        auto& ga = a.grad();
        auto& gb = b.grad();
        const auto& av = a.values();
        const auto& bv = b.values();
        // dA = dC Bᵀ
        for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p) {
                double acc = 0.0;
                const double* grow = g.data() + i * n;
                const double* brow = bv.data() + p * n;
                for (int64_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                ga[static_cast<size_t>(i * k + p)] += acc;
            }
        // dB = Aᵀ dC
        for (int64_t p = 0; p < k; ++p)
            for (int64_t i = 0; i < m; ++i) {
                double aip = av[static_cast<size_t>(i * k + p)];
                if (aip == 0.0) continue;
                const double* grow = g.data() + i * n;
                double* gbrow = gb.data() + p * n;
                for (int64_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
            }
    });
    return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    check_same_shape("add", a, b);
    Tensor out = Tensor::zeros(a.rows(), a.cols());
    for (size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = a.values()[i] + b.values()[i];

    record([a = a, b = b, out = out]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        auto& gb = b.grad();
        for (size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
    return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    check_same_shape("mul", a, b);
    Tensor out = Tensor::zeros(a.rows(), a.cols());
    for (size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = a.values()[i] * b.values()[i];

    record([a = a, b = b, out = out]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        auto& gb = b.grad();
        for (size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * b.values()[i];
            gb[i] += g[i] * a.values()[i];
        }
    });
    return out;
}

Tensor Tape::add_bias(const Tensor& a, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols())
        raise(Status::ShapeMismatch,
              "add_bias: " + a.shape_str() + " vs " + bias.shape_str());
    Tensor out = Tensor::zeros(a.rows(), a.cols());
    const int64_t n = a.cols();
    for (int64_t i = 0; i < a.rows(); ++i)
        for (int64_t j = 0; j < n; ++j)
            out.at(i, j) = a.at(i, j) + bias.values()[static_cast<size_t>(j)];

    record([a = a, bias = bias, out = out]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        auto& gb = bias.grad();
        const int64_t n = a.cols();
        for (int64_t i = 0; i < a.rows(); ++i)
            for (int64_t j = 0; j < n; ++j) {
                double gij = g[static_cast<size_t>(i * n + j)];
                ga[static_cast<size_t>(i * n + j)] += gij;
                gb[static_cast<size_t>(j)] += gij;
            }
    });
    return out;
}

Tensor Tape::scale(const Tensor& a, double factor) {
    Tensor out = Tensor::zeros(a.rows(), a.cols());
    for (size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = factor * a.values()[i];

    record([a = a, out = out, factor]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        for (size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
    });
    return out;
}

Tensor Tape::concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows())
        raise(Status::ShapeMismatch,
              "concat_cols: " + a.shape_str() + " vs " + b.shape_str());
    const int64_t m = a.rows(), na = a.cols(), nb = b.cols();
    Tensor out = Tensor::zeros(m, na + nb);
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < na; ++j) out.at(i, j) = a.at(i, j);
        for (int64_t j = 0; j < nb; ++j) out.at(i, na + j) = b.at(i, j);
    }

    record([a = a, b = b, out = out]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        auto& gb = b.grad();
        const int64_t m = a.rows(), na = a.cols(), nb = b.cols();
        for (int64_t i = 0; i < m; ++i) {
            for (int64_t j = 0; j < na; ++j)
                ga[static_cast<size_t>(i * na + j)] += g[static_cast<size_t>(i * (na + nb) + j)];
            for (int64_t j = 0; j < nb; ++j)
                gb[static_cast<size_t>(i * nb + j)] +=
                    g[static_cast<size_t>(i * (na + nb) + na + j)];
        }
    });
    return out;
}

Tensor Tape::mean_rows(const Tensor& a) {
    const int64_t m = a.rows(), n = a.cols();
    Tensor out = Tensor::zeros(1, n);
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) out.values()[static_cast<size_t>(j)] += a.at(i, j);
    for (int64_t j = 0; j < n; ++j) out.values()[static_cast<size_t>(j)] /= static_cast<double>(m);

    record([a = a, out = out]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        const int64_t m = a.rows(), n = a.cols();
        const double inv = 1.0 / static_cast<double>(m);
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < n; ++j)
                ga[static_cast<size_t>(i * n + j)] += inv * g[static_cast<size_t>(j)];
    });
    return out;
}

Tensor Tape::layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                        double eps) {
    const int64_t m = x.rows(), n = x.cols();
    if (gamma.rows() != 1 || gamma.cols() != n || beta.rows() != 1 || beta.cols() != n)
        raise(Status::ShapeMismatch, "layer_norm affine: " + x.shape_str() + " vs " +
                                         gamma.shape_str() + "/" + beta.shape_str());

    Tensor out = Tensor::zeros(m, n);
    Tensor xhat = Tensor::zeros(m, n); // saved for backward
    std::vector<double> inv_std(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (int64_t j = 0; j < n; ++j) mean += x.at(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (int64_t j = 0; j < n; ++j) {
            double d = x.at(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(i)] = is;
        for (int64_t j = 0; j < n; ++j) {
            double h = (x.at(i, j) - mean) * is;
            xhat.at(i, j) = h;
            out.at(i, j) = gamma.values()[static_cast<size_t>(j)] * h +
                           beta.values()[static_cast<size_t>(j)];
        }
    }

    record([x = x, gamma = gamma, beta = beta, out = out, xhat = xhat, inv_std = inv_std]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        auto& ggamma = gamma.grad();
        auto& gbeta = beta.grad();
        const int64_t m = x.rows(), n = x.cols();
        const double invn = 1.0 / static_cast<double>(n);
        for (int64_t i = 0; i < m; ++i) {
            // h = dL/dxhat for this row; dx = inv_std*(h - mean(h) - xhat*mean(h*xhat))
            double mean_h = 0.0, mean_hxhat = 0.0;
            for (int64_t j = 0; j < n; ++j) {
                double gij = g[static_cast<size_t>(i * n + j)];
                double h = gij * gamma.values()[static_cast<size_t>(j)];
                mean_h += h;
                mean_hxhat += h * xhat.at(i, j);
                ggamma[static_cast<size_t>(j)] += gij * xhat.at(i, j);
                gbeta[static_cast<size_t>(j)] += gij;
            }
            mean_h *= invn;
            mean_hxhat *= invn;
            for (int64_t j = 0; j < n; ++j) {
                double h = g[static_cast<size_t>(i * n + j)] *
                           gamma.values()[static_cast<size_t>(j)];
                gx[static_cast<size_t>(i * n + j)] +=
                    inv_std[static_cast<size_t>(i)] *
                    (h - mean_h - xhat.at(i, j) * mean_hxhat);
            }
        }
    });
    return out;
}

Tensor Tape::gelu(const Tensor& x) {
    Tensor out = Tensor::zeros(x.rows(), x.cols());
    for (size_t i = 0; i < out.values().size(); ++i) {
        double v = x.values()[i];
        out.values()[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    }

    record([x = x, out = out]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        for (size_t i = 0; i < g.size(); ++i) {
            double v = x.values()[i];
            double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
            double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
            gx[i] += g[i] * (cdf + v * pdf);
        }
    });
    return out;
}

Tensor Tape::softmax_rows(const Tensor& x) {
    Tensor out = Tensor::zeros(x.rows(), x.cols());
    out.values() = x.values();
    softmax_inplace(out.values(), x.rows(), x.cols());

    record([x = x, out = out]() mutable {
        const auto& g = out.grad();
        auto& gx = x.grad();
        const int64_t m = x.rows(), n = x.cols();
        for (int64_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (int64_t j = 0; j < n; ++j)
                dot += g[static_cast<size_t>(i * n + j)] * out.at(i, j);
            for (int64_t j = 0; j < n; ++j)
                gx[static_cast<size_t>(i * n + j)] +=
                    out.at(i, j) * (g[static_cast<size_t>(i * n + j)] - dot);
        }
    });
    return out;
}

Tensor Tape::scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                  bool causal_mask) {
    if (q.cols() != k.cols())
        raise(Status::ShapeMismatch,
              "attention q/k: " + q.shape_str() + " vs " + k.shape_str());
    if (k.rows() != v.rows())
        raise(Status::ShapeMismatch,
              "attention k/v: " + k.shape_str() + " vs " + v.shape_str());
    const int64_t tq = q.rows(), tk = k.rows(), dk = q.cols(), dv = v.cols();
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dk));

    Tensor weights = Tensor::zeros(tq, tk); // saved softmax probabilities
    for (int64_t i = 0; i < tq; ++i)
        for (int64_t j = 0; j < tk; ++j) {
            double s = 0.0;
            for (int64_t p = 0; p < dk; ++p) s += q.at(i, p) * k.at(j, p);
            weights.at(i, j) = (causal_mask && j > i) ? -1e30 : s * inv_scale;
        }
    softmax_inplace(weights.values(), tq, tk);

    Tensor out = Tensor::zeros(tq, dv);
    for (int64_t i = 0; i < tq; ++i)
        for (int64_t j = 0; j < tk; ++j) {
            double w = weights.at(i, j);
            if (w == 0.0) continue;
            for (int64_t p = 0; p < dv; ++p) out.at(i, p) += w * v.at(j, p);
        }

    record([q = q, k = k, v = v, out = out, weights = weights, inv_scale]() mutable {
        const auto& g = out.grad();
        auto& gq = q.grad();
        auto& gk = k.grad();
        auto& gv = v.grad();
        const int64_t tq = q.rows(), tk = k.rows(), dk = q.cols(), dv = v.cols();

        // dV = Pᵀ dY
        for (int64_t j = 0; j < tk; ++j)
            for (int64_t p = 0; p < dv; ++p) {
                double acc = 0.0;
                for (int64_t i = 0; i < tq; ++i)
                    acc += weights.at(i, j) * g[static_cast<size_t>(i * dv + p)];
                gv[static_cast<size_t>(j * dv + p)] += acc;
            }

        // dS = P ∘ (dP - rowsum(dP ∘ P)), dP = dY Vᵀ
        for (int64_t i = 0; i < tq; ++i) {
            std::vector<double> dp(static_cast<size_t>(tk), 0.0);
            for (int64_t j = 0; j < tk; ++j) {
                double acc = 0.0;
                for (int64_t p = 0; p < dv; ++p)
                    acc += g[static_cast<size_t>(i * dv + p)] * v.at(j, p);
                dp[static_cast<size_t>(j)] = acc;
            }
            double dot = 0.0;
            for (int64_t j = 0; j < tk; ++j) dot += dp[static_cast<size_t>(j)] * weights.at(i, j);
            for (int64_t j = 0; j < tk; ++j) {
                double ds = weights.at(i, j) * (dp[static_cast<size_t>(j)] - dot) * inv_scale;
                if (ds == 0.0) continue;
                for (int64_t p = 0; p < dk; ++p) {
                    gq[static_cast<size_t>(i * dk + p)] += ds * k.at(j, p);
                    gk[static_cast<size_t>(j * dk + p)] += ds * q.at(i, p);
                }
            }
        }
    });
    return out;
}

Tensor Tape::cross_entropy(const Tensor& logits, int target,
                           const std::optional<Tensor>& class_weights) {
    if (logits.rows() != 1)
        raise(Status::ShapeMismatch, "cross_entropy expects (1,c) logits, got " +
                                         logits.shape_str());
    const int64_t c = logits.cols();
    if (target < 0 || target >= c)
        raise(Status::InvalidArgument, "cross_entropy target " + std::to_string(target) +
                                           " outside 0.." + std::to_string(c - 1));
    double weight = 1.0;
    if (class_weights) {
        if (class_weights->rows() != 1 || class_weights->cols() != c)
            raise(Status::ShapeMismatch, "class_weights: " + logits.shape_str() + " vs " +
                                             class_weights->shape_str());
        weight = class_weights->values()[static_cast<size_t>(target)];
    }

    double m = logits.values()[0];
    for (int64_t j = 1; j < c; ++j) m = std::max(m, logits.values()[static_cast<size_t>(j)]);
    double sum = 0.0;
    for (int64_t j = 0; j < c; ++j)
        sum += std::exp(logits.values()[static_cast<size_t>(j)] - m);
    double lse = m + std::log(sum);
    Tensor out = Tensor::scalar(weight * (lse - logits.values()[static_cast<size_t>(target)]));

    record([logits = logits, out = out, target, weight, lse]() mutable {
        const double g = out.grad()[0];
        auto& gl = logits.grad();
        const int64_t c = logits.cols();
        for (int64_t j = 0; j < c; ++j) {
            double p = std::exp(logits.values()[static_cast<size_t>(j)] - lse);
            double delta = (j == target) ? 1.0 : 0.0;
            gl[static_cast<size_t>(j)] += g * weight * (p - delta);
        }
    });
    return out;
}

Tensor Tape::slice_rows(const Tensor& a, int64_t begin, int64_t end) {
    if (begin < 0 || end > a.rows() || begin >= end)
        raise(Status::InvalidArgument, "slice_rows [" + std::to_string(begin) + "," +
                                           std::to_string(end) + ") of " + a.shape_str());
    const int64_t n = a.cols();
    Tensor out = Tensor::zeros(end - begin, n);
    for (int64_t i = begin; i < end; ++i)
        for (int64_t j = 0; j < n; ++j) out.at(i - begin, j) = a.at(i, j);

    record([a = a, out = out, begin]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        const int64_t n = a.cols();
        for (int64_t i = 0; i < out.rows(); ++i)
            for (int64_t j = 0; j < n; ++j)
                ga[static_cast<size_t>((begin + i) * n + j)] +=
                    g[static_cast<size_t>(i * n + j)];
    });
    return out;
}

Tensor Tape::slice_cols(const Tensor& a, int64_t begin, int64_t end) {
    if (begin < 0 || end > a.cols() || begin >= end)
        raise(Status::InvalidArgument, "slice_cols [" + std::to_string(begin) + "," +
                                           std::to_string(end) + ") of " + a.shape_str());
    const int64_t m = a.rows(), n = a.cols(), w = end - begin;
    Tensor out = Tensor::zeros(m, w);
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < w; ++j) out.at(i, j) = a.at(i, begin + j);

    record([a = a, out = out, begin]() mutable {
        const auto& g = out.grad();
        auto& ga = a.grad();
        const int64_t m = a.rows(), n = a.cols(), w = out.cols();
        for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j)
                ga[static_cast<size_t>(i * n + begin + j)] +=
                    g[static_cast<size_t>(i * w + j)];
    });
    return out;
}

Tensor Tape::stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty()) raise(Status::InvalidArgument, "stack_rows of nothing");
    const int64_t n = rows[0].cols();
    for (const Tensor& r : rows)
        if (r.rows() != 1 || r.cols() != n)
            raise(Status::ShapeMismatch,
                  "stack_rows: expected (1," + std::to_string(n) + "), got " + r.shape_str());
    Tensor out = Tensor::zeros(static_cast<int64_t>(rows.size()), n);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int64_t j = 0; j < n; ++j)
            out.at(static_cast<int64_t>(i), j) = rows[i].values()[static_cast<size_t>(j)];

    record([rows = rows, out = out]() mutable {
        const auto& g = out.grad();
        const int64_t n = out.cols();
        for (size_t i = 0; i < rows.size(); ++i) {
            auto& gr = rows[i].grad();
            for (int64_t j = 0; j < n; ++j)
                gr[static_cast<size_t>(j)] += g[i * static_cast<size_t>(n) + static_cast<size_t>(j)];
        }
    });
    return out;
}

void Tape::backward(Tensor loss) {
    if (loss.numel() != 1)
        raise(Status::ShapeMismatch, "backward expects a scalar loss, got " +
                                         loss.shape_str());
    loss.grad()[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

} // namespace seqdiag::nn
