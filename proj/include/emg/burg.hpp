#pragma once

#include <span>
#include <vector>

namespace emg {

/// Autoregressive coefficients a[1..order] estimated with Burg's method, in
/// the predictor convention x[n] ~ sum_k a[k] x[n-k]. The series is used as
/// given (no mean removal). Requires x.size() > order.
std::vector<double> burg_ar(std::span<const double> x, int order);

}  // namespace emg
