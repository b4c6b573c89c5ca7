#include "emg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emg/error.hpp"
#include "emg/signal.hpp"
#include "emg/stats.hpp"

namespace emg {

void PreprocessConfig::validate(double sample_rate_hz) const {
  if (filter_order != 2 && filter_order != 4) {
    throw ConfigError("preprocess.filter_order must be 2 or 4");
  }
  if (!(lowpass_cutoff_hz > 0.0) || !(lowpass_cutoff_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("low-pass cutoff " + std::to_string(lowpass_cutoff_hz) +
                      " Hz outside (0, fs/2) for fs = " + std::to_string(sample_rate_hz) + " Hz");
  }
  if (!(mvc_percentile > 0.0 && mvc_percentile <= 100.0)) {
    throw ConfigError("preprocess.mvc_percentile must be in (0, 100]");
  }
  if (!(clip_max > 0.0)) throw ConfigError("preprocess.clip_max must be positive");
  if (!(working_rate_hz > 0.0)) throw ConfigError("preprocess.working_rate_hz must be positive");
}

LowpassFilter::LowpassFilter(double cutoff_hz, double sample_rate_hz, int order) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw Error("low-pass cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, fs/2) for fs = " +
                std::to_string(sample_rate_hz) + " Hz");
  }
  if (order < 2 || order % 2 != 0) throw Error("filter order must be a positive even number");
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const double k2 = k * k;
  for (int i = 0; i < order / 2; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order);
    const double q = 1.0 / (2.0 * std::cos(theta));
    const double norm = 1.0 / (1.0 + k / q + k2);
    const double b0 = k2 * norm;
    sections_.emplace_back(b0, 2.0 * b0, b0, 2.0 * (k2 - 1.0) * norm, (1.0 - k / q + k2) * norm);
  }
}

std::vector<double> rectify(std::span<const double> x) {
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::abs(v); });
  return y;
}

std::vector<double> lowpass_causal(std::span<const double> x, double cutoff_hz, double fs_hz, int order) {
  LowpassFilter f(cutoff_hz, fs_hz, order);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f.step(x[i]);
  return y;
}

std::vector<double> normalize(std::span<const double> x, double ref, double clip_max) {
  if (!(ref > 0.0)) throw Error("normalization reference must be positive");
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return std::min(v / ref, clip_max); });
  return y;
}

namespace {

std::vector<double> channel_series(const Sequence& s, std::size_t c) {
  std::vector<double> x(s.emg.size());
  for (std::size_t i = 0; i < s.emg.size(); ++i) x[i] = s.emg[i].values[c];
  return x;
}

std::vector<double> envelope_raw(const Sequence& s, std::size_t c, const PreprocessConfig& cfg) {
  return lowpass_causal(rectify(channel_series(s, c)), cfg.lowpass_cutoff_hz, s.sample_rate_hz,
                        cfg.filter_order);
}

constexpr std::size_t kMinMvcFrames = 100;

}  // namespace

MvcReference mvc_reference(const Sequence& s, const PreprocessConfig& cfg) {
  return mvc_reference(std::span<const Sequence>(&s, 1), cfg);
}

MvcReference mvc_reference(std::span<const Sequence> seqs, const PreprocessConfig& cfg) {
  std::size_t frames = 0;
  for (const auto& s : seqs) {
    cfg.validate(s.sample_rate_hz);
    frames += s.emg.size();
  }
  if (frames < kMinMvcFrames) {
    throw Error("MVC reference needs at least 100 frames, got " + std::to_string(frames));
  }
  MvcReference ref;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    std::vector<double> pooled;
    pooled.reserve(frames);
    for (const auto& s : seqs) {
      auto e = envelope_raw(s, c, cfg);
      pooled.insert(pooled.end(), e.begin(), e.end());
    }
    const double p = percentile(std::move(pooled), cfg.mvc_percentile);
    ref.scale[c] = p <= kMvcFloor ? kMvcFloor : p;
  }
  return ref;
}

ProcessedSequence preprocess_sequence(const Sequence& s, const PreprocessConfig& cfg,
                                      const std::optional<MvcReference>& ref,
                                      const std::optional<ForceNorm>& force_norm) {
  s.validate();
  cfg.validate(s.sample_rate_hz);
  const MvcReference mvc = ref ? *ref : mvc_reference(s, cfg);

  ProcessedSequence ps;
  ps.id = s.id;
  ps.subject_id = s.subject_id;
  ps.hand = s.hand;
  ps.task = s.task;
  ps.protocol = s.protocol;
  ps.sample_rate_hz = s.sample_rate_hz;
  ps.t.resize(s.emg.size());
  for (std::size_t i = 0; i < s.emg.size(); ++i) ps.t[i] = s.emg[i].t;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    ps.envelope[c] = normalize(envelope_raw(s, c, cfg), mvc.scale[c], cfg.clip_max);
  }
  ps.force_newtons = align_force(s);
  const ForceNorm fn = force_norm ? *force_norm : fit_force_norm(ps.force_newtons);
  ps.force.resize(ps.force_newtons.size());
  std::transform(ps.force_newtons.begin(), ps.force_newtons.end(), ps.force.begin(),
                 [&](double f) { return fn.apply(f); });
  ps.labels = s.frame_labels();
  return ps;
}

int working_rate_factor(double sample_rate_hz, const PreprocessConfig& cfg) {
  const double ratio = sample_rate_hz / cfg.working_rate_hz;
  if (ratio <= 1.0 + 1e-9) return 1;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6) {
    throw ConfigError("sample rate " + std::to_string(sample_rate_hz) +
                      " Hz is not an integer multiple of the working rate " +
                      std::to_string(cfg.working_rate_hz) + " Hz");
  }
  return static_cast<int>(rounded);
}

}  // namespace emg
