#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "emg/pipeline.hpp"

namespace emg {

enum class Motor : std::uint8_t { None, FlexExt, RadUln, Grasp };

std::string_view motor_name(Motor m);

struct ActuatorCommand {
  Motor motor = Motor::None;
  int direction = 0;  // +1, -1 or 0
  double intensity = 0.0;
};

/// Gesture picks the motor and direction, normalized force the intensity
/// (clamped to [0, 1]). Rest releases every motor.
ActuatorCommand map_control(Gesture g, double force_norm);

struct ControlOutput {
  double t = 0.0;
  Gesture gesture = Gesture::Rest;
  double force = 0.0;  // normalized, after the output low-pass
  ActuatorCommand command;
};

struct LatencyReport {
  std::size_t frames = 0;
  double min_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  double budget_ms = 10.0;

  bool within_budget() const { return p99_ms < budget_ms; }
};

/// Causal per-frame inference. Frames arrive at the recording rate and are
/// decimated to the model's working rate; after window_len working samples
/// an output is produced every `stride` working samples. Replaying a
/// sequence reproduces predict_sequence exactly. One engine per stream.
class StreamEngine {
 public:
  explicit StreamEngine(std::shared_ptr<const PipelineModel> model);

  std::optional<ControlOutput> push(const EmgFrame& frame);

  /// Same as push for an untyped row; throws unless it holds 8 values.
  std::optional<ControlOutput> push(double t, std::span<const double> values);

  /// Wall-clock push statistics; needs at least 100 pushes.
  LatencyReport latency_report() const;

  std::size_t frames_seen() const { return frames_seen_; }
  const PipelineModel& model() const { return *model_; }

 private:
  std::optional<ControlOutput> step(const EmgFrame& working);

  std::shared_ptr<const PipelineModel> model_;
  std::size_t window_len_;
  std::size_t stride_;

  EmgFrame acc_{};
  int acc_count_ = 0;

  std::vector<LowpassFilter> filters_;  // one per selected channel
  std::vector<double> ring_;            // channel-major, window_len_ per channel
  std::size_t ring_head_ = 0;           // next write slot
  std::size_t working_index_ = 0;

  LowpassFilter output_filter_;
  Window window_;
  std::vector<double> features_, scaled_, reduced_;

  std::size_t frames_seen_ = 0;
  std::vector<double> push_ms_;
};

/// Output rows: t_s,gesture,force_norm,motor,direction,intensity.
void write_control_header(std::ostream& out);
void write_control_row(const ControlOutput& o, std::ostream& out);

}  // namespace emg
