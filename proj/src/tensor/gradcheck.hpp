#pragma once

#include "tensor/tape.hpp"

#include <functional>
#include <vector>

namespace seqdiag::nn {

/// Scalar function of the captured parameters, rebuilt on a fresh tape per
/// call. Implementations must read parameter values at call time.
using ScalarFn = std::function<Tensor(Tape&)>;

/// Compare analytic gradients with central finite differences
/// (f(x+eps) - f(x-eps)) / (2 eps) for every coordinate of every parameter.
/// Relative error uses denominator max(1e-8, |analytic| + |numeric|).
/// Returns the maximum relative error over all coordinates.
double grad_check(const ScalarFn& f, const std::vector<Tensor>& params,
                  double eps = 1e-4);

} // namespace seqdiag::nn
