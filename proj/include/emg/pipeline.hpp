#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emg/features.hpp"
#include "emg/force_norm.hpp"
#include "emg/knn.hpp"
#include "emg/preprocess.hpp"
#include "emg/reduction.hpp"
#include "emg/selection.hpp"
#include "emg/tree.hpp"

namespace emg {

struct ModelConfig {
  int knn_k = 10;
  int min_leaf = 10;
  double output_cutoff_hz = 1.0;  // low-pass on the regressor output
  int output_filter_order = 2;
};

struct ReductionConfig {
  double variance_target = 0.95;
};

struct PipelineConfig {
  PreprocessConfig preprocess;
  FeatureConfig features;  // `channels` is overwritten by selection at fit time
  SelectionConfig selection;
  ReductionConfig reduction;
  ModelConfig models;

  void validate() const;
};

/// Which predictors fit_pipeline builds. Evaluation fits only the head it scores.
enum class Heads { Both, Gesture, Force };

/// Everything needed to run the causal pipeline on new frames.
struct PipelineModel {
  std::string schema_version = "1";
  PreprocessConfig preprocess;
  int downsample_factor = 1;
  double working_rate_hz = 100.0;  // rate after decimation
  MvcReference mvc;
  FeatureConfig features;
  Scaler scaler;
  PcaModel pca;
  KnnModel knn;
  RegressionTree tree;
  ForceNorm force_norm;
  ModelConfig models;

  /// Output rate of the window-cadence prediction stream.
  double output_rate_hz() const { return working_rate_hz / features.stride; }

  /// Dimensions consistent across stages; both heads present when
  /// `require_heads`.
  void validate(bool require_heads = true) const;
};

/// Training sequences brought to the working rate and preprocessed with
/// statistics fitted on exactly these sequences.
struct TrainingData {
  int downsample_factor = 1;
  double working_rate_hz = 100.0;
  MvcReference mvc;
  ForceNorm force_norm;
  std::vector<ProcessedSequence> sequences;
};

/// Common sample rate check + decimation factor for a set of sequences.
int common_downsample_factor(std::span<const Sequence> seqs, const PreprocessConfig& cfg);

TrainingData prepare_training(std::span<const Sequence> seqs, const PipelineConfig& cfg);

/// Preprocess a (non-training) sequence with the model's fitted statistics.
ProcessedSequence prepare_with(const PipelineModel& m, const Sequence& s);

/// Gesture-target ranking uses the MVC-protocol sequences only (all of them
/// when there are none).
ChannelRanking rank_channels(const TrainingData& td, RankTarget target, const PipelineConfig& cfg,
                             std::span<const ChannelId> candidates = {});

PipelineModel fit_pipeline(const TrainingData& td, std::span<const ChannelId> channels, const PipelineConfig& cfg,
                           Heads heads = Heads::Both);

/// prepare_training + rank on cfg.selection.target + fit with the top
/// cfg.selection.channels channels.
PipelineModel fit_pipeline(std::span<const Sequence> seqs, const PipelineConfig& cfg);

/// Per-window predictions of the batch pipeline on one sequence.
struct WindowPrediction {
  double t = 0.0;
  std::size_t end_index = 0;  // working-rate sample index
  Gesture truth_gesture = Gesture::Rest;
  double truth_force = 0.0;  // normalized, window mean
  Gesture gesture = Gesture::Rest;
  double raw_force = 0.0;       // tree output
  double filtered_force = 0.0;  // after the causal output low-pass
};

std::vector<WindowPrediction> predict_processed(const PipelineModel& m, const ProcessedSequence& ps,
                                                Heads heads = Heads::Both);

/// Raw sequence in, window-cadence predictions out (decimate, preprocess,
/// features, scaler, PCA, heads, output filter).
std::vector<WindowPrediction> predict_sequence(const PipelineModel& m, const Sequence& s, Heads heads = Heads::Both);

/// Single-file JSON bundle, schema_version "1". Reals round-trip exactly.
void save_model(const PipelineModel& m, const std::filesystem::path& path);
PipelineModel load_model(const std::filesystem::path& path);
std::string model_to_json(const PipelineModel& m);
PipelineModel model_from_json(const std::string& text);

}  // namespace emg
