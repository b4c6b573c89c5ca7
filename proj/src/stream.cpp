#include "emg/stream.hpp"

#include <algorithm>
#include <cmath>

#include "emg/dataset_io.hpp"
#include "emg/error.hpp"
#include "emg/stats.hpp"

namespace emg {

std::string_view motor_name(Motor m) {
  switch (m) {
    case Motor::FlexExt: return "FlexExt";
    case Motor::RadUln: return "RadUln";
    case Motor::Grasp: return "Grasp";
    case Motor::None: break;
  }
  return "None";
}

ActuatorCommand map_control(Gesture g, double force_norm) {
  ActuatorCommand c;
  switch (g) {
    case Gesture::WF: c = {Motor::FlexExt, +1, 0.0}; break;
    case Gesture::WE: c = {Motor::FlexExt, -1, 0.0}; break;
    case Gesture::WRD: c = {Motor::RadUln, +1, 0.0}; break;
    case Gesture::WUD: c = {Motor::RadUln, -1, 0.0}; break;
    case Gesture::HC: c = {Motor::Grasp, +1, 0.0}; break;
    case Gesture::Rest: return c;
  }
  c.intensity = std::isfinite(force_norm) ? std::clamp(force_norm, 0.0, 1.0) : 0.0;
  return c;
}

StreamEngine::StreamEngine(std::shared_ptr<const PipelineModel> model)
    : model_(std::move(model)),
      window_len_(static_cast<std::size_t>(model_->features.window_len)),
      stride_(static_cast<std::size_t>(model_->features.stride)),
      output_filter_(model_->models.output_cutoff_hz, model_->output_rate_hz(), model_->models.output_filter_order) {
  model_->validate(true);
  const std::size_t k = model_->features.channels.size();
  for (std::size_t j = 0; j < k; ++j) {
    filters_.emplace_back(model_->preprocess.lowpass_cutoff_hz, model_->working_rate_hz,
                          model_->preprocess.filter_order);
  }
  ring_.assign(k * window_len_, 0.0);
  window_.samples = window_len_;
  window_.channels = k;
  window_.block.assign(k * window_len_, 0.0);
  features_.assign(model_->features.feature_count(), 0.0);
  scaled_.assign(features_.size(), 0.0);
  reduced_.assign(model_->pca.retained, 0.0);
}

std::optional<ControlOutput> StreamEngine::push(double t, std::span<const double> values) {
  if (values.size() != kChannelCount) {
    throw Error("frame has " + std::to_string(values.size()) + " channels, expected 8");
  }
  EmgFrame f;
  f.t = t;
  std::copy(values.begin(), values.end(), f.values.begin());
  return push(f);
}

std::optional<ControlOutput> StreamEngine::push(const EmgFrame& frame) {
  const auto start = std::chrono::steady_clock::now();
  ++frames_seen_;
  std::optional<ControlOutput> out;

  acc_.t += frame.t;
  for (std::size_t c = 0; c < kChannelCount; ++c) acc_.values[c] += frame.values[c];
  if (++acc_count_ == model_->downsample_factor) {
    EmgFrame working = acc_;
    if (model_->downsample_factor > 1) {
      working.t /= model_->downsample_factor;
      for (auto& v : working.values) v /= model_->downsample_factor;
    }
    acc_ = EmgFrame{};
    acc_count_ = 0;
    out = step(working);
  }

  push_ms_.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  return out;
}

std::optional<ControlOutput> StreamEngine::step(const EmgFrame& working) {
  const auto& m = *model_;
  const std::size_t k = filters_.size();
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t c = m.features.channels[j].index();
    const double env = filters_[j].step(std::abs(working.values[c]));
    ring_[j * window_len_ + ring_head_] = std::min(env / m.mvc.scale[c], m.preprocess.clip_max);
  }
  ring_head_ = (ring_head_ + 1) % window_len_;
  const std::size_t idx = working_index_++;

  if (idx + 1 < window_len_ || (idx + 1 - window_len_) % stride_ != 0) return std::nullopt;

  // Oldest sample sits at ring_head_ once the buffer is full.
  for (std::size_t j = 0; j < k; ++j) {
    const double* src = ring_.data() + j * window_len_;
    double* dst = window_.block.data() + j * window_len_;
    const std::size_t tail = window_len_ - ring_head_;
    std::copy(src + ring_head_, src + window_len_, dst);
    std::copy(src, src + ring_head_, dst + tail);
  }
  window_.end_index = idx;
  window_.end_time = working.t;

  window_features(window_, m.features, features_);
  m.scaler.apply_row(features_, scaled_);
  m.pca.project_row(scaled_, reduced_);

  ControlOutput o;
  o.t = working.t;
  o.gesture = knn_predict(m.knn, reduced_);
  o.force = output_filter_.step(tree_predict(m.tree, reduced_));
  o.command = map_control(o.gesture, o.force);
  return o;
}

LatencyReport StreamEngine::latency_report() const {
  if (push_ms_.size() < 100) {
    throw Error("latency report needs at least 100 processed frames, have " + std::to_string(push_ms_.size()));
  }
  LatencyReport r;
  r.frames = push_ms_.size();
  r.min_ms = *std::min_element(push_ms_.begin(), push_ms_.end());
  r.median_ms = percentile(push_ms_, 50.0);
  r.p99_ms = percentile(push_ms_, 99.0);
  return r;
}

void write_control_header(std::ostream& out) { out << "t_s,gesture,force_norm,motor,direction,intensity\n"; }

void write_control_row(const ControlOutput& o, std::ostream& out) {
  out << format_real9(o.t) << ',' << gesture_name(o.gesture) << ',' << format_real9(o.force) << ','
      << motor_name(o.command.motor) << ',' << o.command.direction << ',' << format_real9(o.command.intensity)
      << '\n';
}

}  // namespace emg
