#pragma once

#include <span>

namespace emg {

/// Force normalization: y = (f - offset) / scale, where offset is the
/// minimum observed force and scale the 95th percentile of (f - offset).
struct ForceNorm {
  double offset = 0.0;
  double scale = 1.0;

  double apply(double newtons) const { return (newtons - offset) / scale; }
  double invert(double normalized) const { return normalized * scale + offset; }
};

inline constexpr double kForceScaleFloor = 1e-9;

ForceNorm fit_force_norm(std::span<const double> forces, double percentile_rank = 95.0);

}  // namespace emg
