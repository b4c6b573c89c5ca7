#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "emg/matrix.hpp"
#include "emg/preprocess.hpp"
#include "emg/types.hpp"

namespace emg {

struct FeatureConfig {
  int window_len = 20;  // samples; 200 ms at 100 Hz
  int stride = 5;
  int ar_order = 4;
  bool include_spatial = true;
  std::vector<ChannelId> channels = all_channels();

  void validate() const;

  std::size_t per_channel_count() const { return 7 + static_cast<std::size_t>(ar_order); }
  std::size_t feature_count() const {
    return channels.size() * per_channel_count() + (include_spatial ? 6 : 0);
  }

  /// "ch<id>_<NAME>" per channel block, then "spatial_<NAME>".
  std::vector<std::string> feature_names() const;
};

/// N samples of K channel envelopes, channel-major: block[k * N + i].
struct Window {
  std::size_t samples = 0;
  std::size_t channels = 0;
  std::vector<double> block;
  std::size_t end_index = 0;
  double end_time = 0.0;
  Gesture label = Gesture::Rest;
  double force = 0.0;  // mean normalized force over the window

  std::span<const double> channel(std::size_t k) const { return {block.data() + k * samples, samples}; }
};

/// Full windows ending at samples N-1, N-1+stride, ...
std::vector<Window> make_windows(const ProcessedSequence& ps, const FeatureConfig& cfg);

/// [MAV, RMS, VAR, STD, MAX, MIN, WL, AR1..ARp]. VAR is the population
/// variance. AR coefficients come from Burg's method on the mean-removed
/// series and are all zero when VAR < 1e-12.
std::vector<double> time_features(std::span<const double> x, int ar_order);

/// Writes time_features into `out` (size 7 + ar_order) without allocating
/// the result vector.
void time_features_into(std::span<const double> x, int ar_order, std::span<double> out);

/// Cross-channel [MAV, RMS, VAR, STD, MAX, MIN] at each sample time,
/// averaged over the window.
std::array<double, 6> spatial_features(const Window& w);

/// One feature row for a window, in FeatureConfig::feature_names() order.
void window_features(const Window& w, const FeatureConfig& cfg, std::span<double> out);

struct FeatureMatrix {
  std::vector<std::string> names;
  Matrix x;
  std::vector<Gesture> labels;
  std::vector<double> force;
  std::vector<double> end_time;

  std::size_t rows() const { return x.rows(); }
};

/// Rows in window order. Windows are processed in parallel; the result is
/// identical to extract_features_serial.
FeatureMatrix extract_features(std::span<const Window> windows, const FeatureConfig& cfg);
FeatureMatrix extract_features_serial(std::span<const Window> windows, const FeatureConfig& cfg);

/// Header = feature names, then label and force columns.
void write_feature_csv(const FeatureMatrix& fm, std::ostream& out);

}  // namespace emg
