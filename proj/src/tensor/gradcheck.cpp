#include "tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace seqdiag::nn {

double grad_check(const ScalarFn& f, const std::vector<Tensor>& params, double eps) {
    std::vector<Tensor> mutable_params = params; // handles share buffers
    for (Tensor& p : mutable_params) p.zero_grad();

    Tape tape;
    Tensor loss = f(tape);
    tape.backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(mutable_params.size());
    for (Tensor& p : mutable_params) analytic.push_back(p.grad());

    auto value_of = [&]() {
        Tape t;
        return f(t).item();
    };

    double max_rel = 0.0;
    for (size_t pi = 0; pi < mutable_params.size(); ++pi) {
        auto& v = mutable_params[pi].values();
        for (size_t i = 0; i < v.size(); ++i) {
            const double saved = v[i];
            v[i] = saved + eps;
            double fp = value_of();
            v[i] = saved - eps;
            double fm = value_of();
            v[i] = saved;
            double numeric = (fp - fm) / (2.0 * eps);
            double a = analytic[pi][i];
            double rel = std::fabs(a - numeric) /
                         std::max(1e-8, std::fabs(a) + std::fabs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

} // namespace seqdiag::nn
