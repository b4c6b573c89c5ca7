#pragma once

#include <vector>

#include "emg/types.hpp"

namespace emg {

/// Block-mean decimation: each output frame is the per-channel mean of
/// `factor` consecutive frames, stamped with the mean block timestamp. A
/// trailing partial block is dropped. Force and labels are carried over.
Sequence downsample_emg(const Sequence& s, int factor);

/// Force linearly interpolated at every EMG timestamp, clamped to the end
/// values outside the force time span.
std::vector<double> align_force(const Sequence& s);

}  // namespace emg
