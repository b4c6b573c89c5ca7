#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "emg/pipeline.hpp"

namespace emg {

struct FoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> held_out;  // indices into the sequence list
  std::vector<std::vector<std::string>> held_out_ids;

  /// Indices of every sequence not held out in `fold`.
  std::vector<std::size_t> training(std::size_t fold, std::size_t total) const;
};

/// Whole sequences dealt to folds, stratified by (protocol, task): each
/// stratum is shuffled with `seed` and dealt round-robin, continuing where the
/// previous stratum stopped so fold sizes differ by at most one.
FoldPlan kfold_by_sequence(std::span<const Sequence> seqs, int k = 5, std::uint64_t seed = 0);

using Confusion = std::array<std::array<std::size_t, kGestureCount>, kGestureCount>;  // [truth][pred]

double accuracy(std::span<const Gesture> pred, std::span<const Gesture> truth);
Confusion confusion_matrix(std::span<const Gesture> pred, std::span<const Gesture> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);

/// Median of 100 |pred - truth| / |truth| over samples with |truth| >= eps.
/// nullopt when no sample qualifies.
std::optional<double> mdape(std::span<const double> pred, std::span<const double> truth, double eps = 0.05);

struct EvalConfig {
  int folds = 5;
  double mdape_eps = 0.05;
  bool gr_include_step = false;  // staircase sequences in the gesture study

  void validate() const;
};

/// Restricts the channel choice of an evaluation run.
struct ChannelPolicy {
  std::optional<std::vector<ChannelId>> fixed;  // bypass mRMR
  std::vector<ChannelId> candidates;            // mRMR pool (empty = all 8)
};

/// One held-out window, for plotting predicted vs true traces.
struct TracePoint {
  std::string sequence_id;
  double t = 0.0;
  Gesture truth_gesture = Gesture::Rest;
  Gesture gesture = Gesture::Rest;
  double truth_force = 0.0;
  double force = 0.0;  // filtered prediction
};

struct GrReport {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  Confusion confusion{};
  std::vector<std::vector<ChannelId>> fold_channels;
  std::vector<std::size_t> fold_pca_components;
  std::vector<TracePoint> traces;
};

struct FeReport {
  std::vector<double> fold_rmse;
  std::vector<std::optional<double>> fold_mdape;
  double mean_rmse = 0.0;
  std::optional<double> mean_mdape;
  std::vector<std::vector<ChannelId>> fold_channels;
  std::vector<std::size_t> fold_pca_components;
  std::vector<TracePoint> traces;
};

/// The model evaluate_gr / evaluate_fe fit for one fold: every statistic
/// comes from the training sequences of `fold` only.
PipelineModel fit_fold(std::span<const Sequence> seqs, const FoldPlan& plan, std::size_t fold, const PipelineConfig& cfg,
                       RankTarget target, int channels, Heads heads, const ChannelPolicy& policy = {});

/// Per fold: fit on the training sequences only (decimation, MVC, force
/// normalization, mRMR on the gesture target, features, scaler, PCA, KNN),
/// then score window accuracy on the held-out sequences.
GrReport evaluate_gr(std::span<const Sequence> seqs, const PipelineConfig& cfg, const FoldPlan& plan,
                     int channels, const ChannelPolicy& policy = {});

/// Same fold discipline with mRMR on the force target and the regression
/// tree; predictions go through the causal output filter before scoring.
FeReport evaluate_fe(std::span<const Sequence> seqs, const PipelineConfig& cfg, const FoldPlan& plan, int channels,
                     double mdape_eps = 0.05, const ChannelPolicy& policy = {});

struct SweepRow {
  int channels = 0;
  double gr_accuracy = 0.0;
  double gr_accuracy_std = 0.0;
  double fe_rmse = 0.0;
  std::optional<double> fe_mdape;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// Per fold, the gesture- and force-target rankings (reused across counts).
  std::vector<ChannelRanking> gr_rankings;
  std::vector<ChannelRanking> fe_rankings;
};

/// Channel counts `k_min..k_max`, one mRMR ranking per fold and target.
SweepReport channel_sweep(std::span<const Sequence> gr_seqs, const FoldPlan& gr_plan,
                          std::span<const Sequence> fe_seqs, const FoldPlan& fe_plan, const PipelineConfig& cfg,
                          double mdape_eps = 0.05, int k_min = 1, int k_max = 8);

/// Reference accuracy / MdAPE figures for the same channel counts, printed
/// next to ours as an annotation.
std::string reference_gr_figure(int channels);
std::string reference_fe_figure(int channels);

void write_sweep_csv(const SweepReport& r, std::ostream& out);
void write_trace_csv(std::span<const TracePoint> traces, std::ostream& out);
void write_confusion_csv(const Confusion& c, std::ostream& out);

}  // namespace emg
