#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emg/force_norm.hpp"
#include "emg/types.hpp"

namespace emg {

struct PreprocessConfig {
  double lowpass_cutoff_hz = 5.0;
  int filter_order = 2;
  double mvc_percentile = 95.0;
  double clip_max = 2.0;
  /// Sequences recorded faster than this are block-mean decimated to it.
  double working_rate_hz = 100.0;

  /// Checks the cutoff against the Nyquist rate of `sample_rate_hz`.
  void validate(double sample_rate_hz) const;
};

/// Per-channel MVC scale in raw units.
struct MvcReference {
  std::array<double, kChannelCount> scale{};
};

inline constexpr double kMvcFloor = 1e-9;

/// Transposed direct-form II biquad.
class Biquad {
 public:
  Biquad() = default;
  Biquad(double b0, double b1, double b2, double a1, double a2)
      : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2) {}

  double step(double x) {
    const double y = b0_ * x + s1_;
    s1_ = b1_ * x - a1_ * y + s2_;
    s2_ = b2_ * x - a2_ * y;
    return y;
  }

  /// Loads the state a constant input `x` would settle to (unity DC gain).
  void prime(double x) {
    s2_ = (b2_ - a2_) * x;
    s1_ = (b1_ - a1_) * x + s2_;
  }

  double dc_gain() const { return (b0_ + b1_ + b2_) / (1.0 + a1_ + a2_); }

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
  double s1_ = 0.0, s2_ = 0.0;
};

/// Causal Butterworth low-pass as cascaded biquads (bilinear transform with
/// prewarping). The state is primed with the first sample it sees.
class LowpassFilter {
 public:
  LowpassFilter(double cutoff_hz, double sample_rate_hz, int order);

  double step(double x) {
    if (!primed_) {
      for (auto& s : sections_) s.prime(x);
      primed_ = true;
    }
    for (auto& s : sections_) x = s.step(x);
    return x;
  }

  std::span<const Biquad> sections() const { return sections_; }

 private:
  std::vector<Biquad> sections_;
  bool primed_ = false;
};

std::vector<double> rectify(std::span<const double> x);

std::vector<double> lowpass_causal(std::span<const double> x, double cutoff_hz, double fs_hz, int order);

/// y[i] = min(x[i] / ref, clip_max).
std::vector<double> normalize(std::span<const double> x, double ref, double clip_max);

/// MVC scale from one sequence: percentile of the rectified, low-passed signal.
MvcReference mvc_reference(const Sequence& s, const PreprocessConfig& cfg);

/// Same, pooling samples of every sequence (each filtered independently).
MvcReference mvc_reference(std::span<const Sequence> seqs, const PreprocessConfig& cfg);

/// Rectified, filtered and MVC-normalized envelopes with the force track and
/// labels resampled onto the EMG timeline.
struct ProcessedSequence {
  std::string id;
  std::string subject_id;
  Hand hand = Hand::Right;
  Gesture task = Gesture::Rest;
  Protocol protocol = Protocol::Mvc;
  double sample_rate_hz = 0.0;

  std::vector<double> t;
  std::array<std::vector<double>, kChannelCount> envelope;
  std::vector<double> force_newtons;
  std::vector<double> force;  // normalized
  std::vector<Gesture> labels;

  std::size_t size() const { return t.size(); }
};

/// rectify -> lowpass_causal -> normalize per channel. The MVC reference and
/// force normalization are fitted on this sequence when not supplied.
ProcessedSequence preprocess_sequence(const Sequence& s, const PreprocessConfig& cfg,
                                      const std::optional<MvcReference>& ref = std::nullopt,
                                      const std::optional<ForceNorm>& force_norm = std::nullopt);

/// Integer decimation factor that brings `sample_rate_hz` to the working rate.
int working_rate_factor(double sample_rate_hz, const PreprocessConfig& cfg);

}  // namespace emg
