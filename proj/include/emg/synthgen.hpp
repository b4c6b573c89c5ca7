#pragma once

#include <array>
#include <cstdint>

#include "emg/types.hpp"

namespace emg {

/// Relative activation per gesture (row, Gesture order) and channel (column).
using ActivationTemplate = std::array<std::array<double, kChannelCount>, kGestureCount>;

/// Forearm activation pattern in which channels 2, 5 and 8 (extensor
/// digitorum, flexor carpi radialis, flexor carpi ulnaris) do the work
/// and the rest sit near the noise floor, seeing mostly crosstalk.
ActivationTemplate default_activation_template();

struct SynthSpec {
  int subjects = 6;
  int hands = 2;  // 1 = right only, 2 = left and right
  ActivationTemplate activation = default_activation_template();
  /// Peak force (N) of a maximal effort per gesture, Gesture order.
  std::array<double, kGestureCount> max_force_n = {0.0, 140.0, 110.0, 120.0, 130.0, 300.0};

  double sample_rate_hz = 200.0;
  double force_rate_hz = 50.0;
  double mvc_amplitude = 60.0;   // carrier amplitude at full activation, raw units
  double noise_std = 2.5;        // additive sensor noise, raw units
  double carrier_jitter = 0.2;   // relative amplitude jitter of the carrier
  double carrier_hz = 35.0;      // centre frequency of the carrier
  double carrier_spread_hz = 4.0; // per-sample frequency jitter (std) of the carrier
  double crosstalk = 0.2;        // share of activation leaking from the ring neighbours
  double gain_spread = 0.10;     // per subject/hand/channel electrode gain, +/- fraction
  double strength_spread = 0.05; // per subject/hand force capacity, +/- fraction
  double force_noise_n = 0.3;

  double rest_s = 5.0;  // each rest phase lasts rest_s .. rest_s + phase_jitter_s
  double ramp_s = 1.0;
  double hold_s = 5.0;
  double phase_jitter_s = 1.0;

  int step_levels = 10;       // staircase 0..step_levels * step_increment_n
  double step_increment_n = 10.0;
  double step_level_s = 5.0;
  double step_ramp_s = 0.3;
  double step_lead_s = 3.0;

  std::uint64_t seed = 2024;

  void validate() const;
};

/// One trapezoidal MVC effort (rest, ramp, hold, ramp, rest) for `task`.
/// Labels cover the contraction from ramp-up start to ramp-down end.
Sequence generate_sequence(const SynthSpec& spec, int subject, Hand hand, Gesture task);

/// Hand-close staircase 0, 10, ..., 100 N. Labelled HC from the first
/// non-zero level to the end of the last.
Sequence generate_step_task(const SynthSpec& spec, int subject, Hand hand);

/// subjects x hands x (5 gestures + 1 staircase) sequences.
Dataset generate_dataset(const SynthSpec& spec);

/// Sequences of the MVC gesture protocol only.
std::vector<Sequence> gesture_subset(const Dataset& d);

}  // namespace emg
