#include "emg/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "emg/burg.hpp"
#include "emg/dataset_io.hpp"
#include "emg/error.hpp"
#include "emg/kernels.hpp"

namespace emg {

namespace {

constexpr std::array<const char*, 7> kTimeNames = {"MAV", "RMS", "VAR", "STD", "MAX", "MIN", "WL"};
constexpr std::array<const char*, 6> kSpatialNames = {"MAV", "RMS", "VAR", "STD", "MAX", "MIN"};
constexpr double kArVarianceFloor = 1e-12;

}  // namespace

void FeatureConfig::validate() const {
  if (ar_order < 0) throw ConfigError("features.ar_order must be >= 0");
  if (window_len < ar_order + 2) throw ConfigError("features.window_len must be >= ar_order + 2");
  if (stride < 1) throw ConfigError("features.stride must be >= 1");
  if (channels.empty() || channels.size() > kChannelCount) {
    throw ConfigError("feature channel subset must hold 1..8 channels");
  }
}

std::vector<std::string> FeatureConfig::feature_names() const {
  std::vector<std::string> names;
  names.reserve(feature_count());
  for (const auto& ch : channels) {
    const std::string prefix = "ch" + std::to_string(ch.value()) + "_";
    for (const char* n : kTimeNames) names.push_back(prefix + n);
    for (int k = 1; k <= ar_order; ++k) names.push_back(prefix + "AR" + std::to_string(k));
  }
  if (include_spatial) {
    for (const char* n : kSpatialNames) names.push_back(std::string("spatial_") + n);
  }
  return names;
}

std::vector<Window> make_windows(const ProcessedSequence& ps, const FeatureConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.window_len);
  const auto stride = static_cast<std::size_t>(cfg.stride);
  const std::size_t len = ps.size();
  if (len < n) {
    throw Error("sequence '" + ps.id + "' has " + std::to_string(len) + " samples, shorter than the window (" +
                std::to_string(n) + ")");
  }
  const std::size_t k = cfg.channels.size();
  const std::size_t count = (len - n) / stride + 1;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t end = n - 1 + w * stride;
    const std::size_t begin = end + 1 - n;
    Window win;
    win.samples = n;
    win.channels = k;
    win.block.resize(n * k);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& env = ps.envelope[cfg.channels[j].index()];
      std::copy(env.begin() + static_cast<std::ptrdiff_t>(begin), env.begin() + static_cast<std::ptrdiff_t>(end + 1),
                win.block.begin() + static_cast<std::ptrdiff_t>(j * n));
    }
    win.end_index = end;
    win.end_time = ps.t[end];
    win.label = ps.labels[end];
    double f = 0.0;
    for (std::size_t i = begin; i <= end; ++i) f += ps.force[i];
    win.force = f / static_cast<double>(n);
    out.push_back(std::move(win));
  }
  return out;
}

void time_features_into(std::span<const double> x, int ar_order, std::span<double> out) {
  const std::size_t n = x.size();
  if (ar_order < 0 || n < static_cast<std::size_t>(ar_order) + 2) {
    throw Error("time features need at least ar_order + 2 samples");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum_abs = 0.0, sum = 0.0, sum_sq = 0.0, wl = 0.0;
  double mx = x[0], mn = x[0];
  for (std::size_t i = 0; i < n; ++i) {
    sum_abs += std::abs(x[i]);
    sum += x[i];
    sum_sq += x[i] * x[i];
    mx = std::max(mx, x[i]);
    mn = std::min(mn, x[i]);
    if (i > 0) wl += std::abs(x[i] - x[i - 1]);
  }
  const double mu = sum * inv_n;
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  var *= inv_n;

  out[0] = sum_abs * inv_n;
  out[1] = std::sqrt(sum_sq * inv_n);
  out[2] = var;
  out[3] = std::sqrt(var);
  out[4] = mx;
  out[5] = mn;
  out[6] = wl;
  auto ar = out.subspan(7, static_cast<std::size_t>(ar_order));
  if (var < kArVarianceFloor) {
    std::fill(ar.begin(), ar.end(), 0.0);
    return;
  }
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mu;
  const auto coeffs = burg_ar(centered, ar_order);
  std::copy(coeffs.begin(), coeffs.end(), ar.begin());
}

std::vector<double> time_features(std::span<const double> x, int ar_order) {
  std::vector<double> out(7 + static_cast<std::size_t>(std::max(ar_order, 0)));
  time_features_into(x, ar_order, out);
  return out;
}

std::array<double, 6> spatial_features(const Window& w) {
  std::array<double, 6> acc{};
  if (w.channels == 0 || w.samples == 0) throw Error("spatial features need at least one channel");
  const double inv_k = 1.0 / static_cast<double>(w.channels);
  for (std::size_t i = 0; i < w.samples; ++i) {
    double sum_abs = 0.0, sum = 0.0, sum_sq = 0.0;
    double mx = w.block[i], mn = w.block[i];
    for (std::size_t k = 0; k < w.channels; ++k) {
      const double v = w.block[k * w.samples + i];
      sum_abs += std::abs(v);
      sum += v;
      sum_sq += v * v;
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    const double mu = sum * inv_k;
    double var = 0.0;
    for (std::size_t k = 0; k < w.channels; ++k) {
      const double d = w.block[k * w.samples + i] - mu;
      var += d * d;
    }
    var *= inv_k;
    acc[0] += sum_abs * inv_k;
    acc[1] += std::sqrt(sum_sq * inv_k);
    acc[2] += var;
    acc[3] += std::sqrt(var);
    acc[4] += mx;
    acc[5] += mn;
  }
  for (auto& a : acc) a /= static_cast<double>(w.samples);
  return acc;
}

void window_features(const Window& w, const FeatureConfig& cfg, std::span<double> out) {
  const std::size_t per = cfg.per_channel_count();
  if (w.channels != cfg.channels.size() || out.size() != cfg.feature_count()) {
    throw Error("window shape does not match the feature configuration");
  }
  for (std::size_t k = 0; k < w.channels; ++k) {
    time_features_into(w.channel(k), cfg.ar_order, out.subspan(k * per, per));
  }
  if (cfg.include_spatial) {
    const auto sp = spatial_features(w);
    std::copy(sp.begin(), sp.end(), out.begin() + static_cast<std::ptrdiff_t>(w.channels * per));
  }
}

namespace {

FeatureMatrix features_with(std::span<const Window> windows, const FeatureConfig& cfg, bool parallel) {
  cfg.validate();
  if (windows.empty()) throw Error("feature extraction needs at least one window");
  FeatureMatrix fm;
  fm.names = cfg.feature_names();
  fm.x = Matrix(windows.size(), cfg.feature_count());
  if (parallel) {
    kernels::omp::feature_rows(windows, cfg, fm.x);
  } else {
    kernels::serial::feature_rows(windows, cfg, fm.x);
  }
  fm.labels.reserve(windows.size());
  fm.force.reserve(windows.size());
  fm.end_time.reserve(windows.size());
  for (const auto& w : windows) {
    fm.labels.push_back(w.label);
    fm.force.push_back(w.force);
    fm.end_time.push_back(w.end_time);
  }
  return fm;
}

}  // namespace

FeatureMatrix extract_features(std::span<const Window> windows, const FeatureConfig& cfg) {
  return features_with(windows, cfg, true);
}

FeatureMatrix extract_features_serial(std::span<const Window> windows, const FeatureConfig& cfg) {
  return features_with(windows, cfg, false);
}

void write_feature_csv(const FeatureMatrix& fm, std::ostream& out) {
  for (const auto& n : fm.names) out << n << ',';
  out << "label,force\n";
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    for (double v : fm.x.row(r)) out << format_real9(v) << ',';
    out << gesture_name(fm.labels[r]) << ',' << format_real9(fm.force[r]) << '\n';
  }
}

}  // namespace emg
