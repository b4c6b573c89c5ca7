#include "emg/force_norm.hpp"

#include <algorithm>
#include <vector>

#include "emg/error.hpp"
#include "emg/stats.hpp"

namespace emg {

ForceNorm fit_force_norm(std::span<const double> forces, double percentile_rank) {
  if (forces.empty()) throw Error("cannot fit force normalization on an empty series");
  ForceNorm n;
  n.offset = *std::min_element(forces.begin(), forces.end());
  std::vector<double> shifted(forces.size());
  std::transform(forces.begin(), forces.end(), shifted.begin(), [&](double f) { return f - n.offset; });
  n.scale = std::max(percentile(std::move(shifted), percentile_rank), kForceScaleFloor);
  return n;
}

}  // namespace emg
