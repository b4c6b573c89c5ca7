#include "emg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emg/error.hpp"
#include "emg/signal.hpp"

namespace emg {

void PipelineConfig::validate() const {
  features.validate();
  selection.validate();
  if (!(reduction.variance_target > 0.0 && reduction.variance_target <= 1.0)) {
    throw ConfigError("reduction.variance_target must be in (0, 1]");
  }
  if (models.knn_k < 1) throw ConfigError("models.knn_k must be >= 1");
  if (models.min_leaf < 1) throw ConfigError("models.min_leaf must be >= 1");
  if (models.output_filter_order != 2 && models.output_filter_order != 4) {
    throw ConfigError("models.output_filter_order must be 2 or 4");
  }
  const double out_rate = preprocess.working_rate_hz / features.stride;
  if (!(models.output_cutoff_hz > 0.0) || !(models.output_cutoff_hz < out_rate / 2.0)) {
    throw ConfigError("models.output_cutoff_hz must be below half the output rate (" + std::to_string(out_rate) +
                      " Hz)");
  }
  preprocess.validate(preprocess.working_rate_hz);
}

void PipelineModel::validate(bool require_heads) const {
  auto bad = [](const std::string& what) { throw Error("invalid model bundle: " + what); };
  if (schema_version != "1") bad("unsupported schema_version '" + schema_version + "'");
  try {
    features.validate();
    preprocess.validate(working_rate_hz);
  } catch (const ConfigError& e) {
    bad(e.what());
  }
  if (downsample_factor < 1) bad("downsample_factor < 1");
  for (double s : mvc.scale) {
    if (!(s > 0.0) || !std::isfinite(s)) bad("MVC scales must be positive");
  }
  if (!(force_norm.scale > 0.0)) bad("force scale must be positive");
  const std::size_t d = features.feature_count();
  if (scaler.mean.size() != d || scaler.std.size() != d) bad("scaler dimension does not match the feature count");
  if (pca.mean.size() != d) bad("PCA input dimension does not match the scaler");
  if (pca.components.cols() != d || pca.components.rows() == 0 || pca.components.rows() > d) {
    bad("PCA component matrix has the wrong shape");
  }
  if (pca.explained_ratio.size() != pca.components.rows()) bad("PCA explained ratios do not match components");
  if (pca.retained < 1 || pca.retained > pca.components.rows()) bad("PCA retained count out of range");
  const std::size_t m = pca.retained;
  const bool has_knn = knn.points.rows() > 0;
  const bool has_tree = !tree.empty();
  if (require_heads && (!has_knn || !has_tree)) bad("both the KNN and tree heads are required");
  if (has_knn) {
    if (knn.points.cols() != m) bad("KNN dimension does not match the PCA output");
    if (knn.labels.size() != knn.points.rows()) bad("KNN labels do not match stored rows");
    if (knn.k < 1 || static_cast<std::size_t>(knn.k) > knn.points.rows()) bad("KNN k out of range");
  }
  if (has_tree) {
    if (tree.dims != m) bad("tree dimension does not match the PCA output");
    const auto n = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      if (node.feature >= static_cast<int>(m)) bad("tree split feature out of range");
      if (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n) bad("tree child index out of range");
      if (!std::isfinite(node.threshold)) bad("tree threshold not finite");
    }
  }
  if (!(models.output_cutoff_hz > 0.0 && models.output_cutoff_hz < output_rate_hz() / 2.0)) {
    bad("output filter cutoff above Nyquist");
  }
}

int common_downsample_factor(std::span<const Sequence> seqs, const PreprocessConfig& cfg) {
  if (seqs.empty()) throw Error("no sequences to train on");
  const int factor = working_rate_factor(seqs.front().sample_rate_hz, cfg);
  for (const auto& s : seqs) {
    if (working_rate_factor(s.sample_rate_hz, cfg) != factor ||
        std::abs(s.sample_rate_hz - seqs.front().sample_rate_hz) > 1e-9) {
      throw Error("sequences have different sample rates ('" + s.id + "')");
    }
  }
  return factor;
}

TrainingData prepare_training(std::span<const Sequence> seqs, const PipelineConfig& cfg) {
  TrainingData td;
  td.downsample_factor = common_downsample_factor(seqs, cfg.preprocess);
  td.working_rate_hz = seqs.front().sample_rate_hz / td.downsample_factor;

  std::vector<Sequence> ds;
  ds.reserve(seqs.size());
  std::vector<double> forces;
  for (const auto& s : seqs) {
    ds.push_back(downsample_emg(s, td.downsample_factor));
    const auto f = align_force(ds.back());
    forces.insert(forces.end(), f.begin(), f.end());
  }
  td.force_norm = fit_force_norm(forces);
  td.mvc = mvc_reference(ds, cfg.preprocess);
  td.sequences.reserve(ds.size());
  for (const auto& s : ds) td.sequences.push_back(preprocess_sequence(s, cfg.preprocess, td.mvc, td.force_norm));
  return td;
}

ProcessedSequence prepare_with(const PipelineModel& m, const Sequence& s) {
  return preprocess_sequence(downsample_emg(s, m.downsample_factor), m.preprocess, m.mvc, m.force_norm);
}

ChannelRanking rank_channels(const TrainingData& td, RankTarget target, const PipelineConfig& cfg,
                             std::span<const ChannelId> candidates) {
  if (target == RankTarget::Gesture) {
    // Staircase sequences are labelled HC from end to end; they say nothing
    // about telling gestures apart and would drown the MVC trials.
    std::vector<ProcessedSequence> mvc;
    for (const auto& ps : td.sequences) {
      if (ps.protocol == Protocol::Mvc) mvc.push_back(ps);
    }
    if (!mvc.empty()) return mrmr_rank(mvc, target, cfg.selection, candidates);
  }
  return mrmr_rank(td.sequences, target, cfg.selection, candidates);
}

namespace {

FeatureMatrix stacked_features(std::span<const ProcessedSequence> seqs, const FeatureConfig& fc) {
  std::vector<Window> windows;
  for (const auto& ps : seqs) {
    auto w = make_windows(ps, fc);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return extract_features(windows, fc);
}

}  // namespace

PipelineModel fit_pipeline(const TrainingData& td, std::span<const ChannelId> channels, const PipelineConfig& cfg,
                           Heads heads) {
  cfg.validate();
  PipelineModel m;
  m.preprocess = cfg.preprocess;
  m.downsample_factor = td.downsample_factor;
  m.working_rate_hz = td.working_rate_hz;
  m.mvc = td.mvc;
  m.force_norm = td.force_norm;
  m.models = cfg.models;
  m.features = cfg.features;
  m.features.channels.assign(channels.begin(), channels.end());
  m.features.validate();

  const FeatureMatrix fm = stacked_features(td.sequences, m.features);
  m.scaler = fit_scaler(fm.x);
  const Matrix xs = apply_scaler(m.scaler, fm.x);
  m.pca = fit_pca(xs, cfg.reduction.variance_target);
  Matrix z = pca_transform(m.pca, xs);

  if (heads != Heads::Gesture) {
    m.tree = tree_fit(z, fm.force, TreeConfig{static_cast<std::size_t>(cfg.models.min_leaf), 0});
  }
  if (heads != Heads::Force) m.knn = knn_fit(std::move(z), fm.labels, cfg.models.knn_k);
  m.validate(heads == Heads::Both);
  return m;
}

PipelineModel fit_pipeline(std::span<const Sequence> seqs, const PipelineConfig& cfg) {
  cfg.validate();
  const TrainingData td = prepare_training(seqs, cfg);
  const auto ranking = rank_channels(td, cfg.selection.target, cfg);
  const auto channels = select_channels(ranking, cfg.selection.channels);
  return fit_pipeline(td, channels, cfg, Heads::Both);
}

std::vector<WindowPrediction> predict_processed(const PipelineModel& m, const ProcessedSequence& ps, Heads heads) {
  const auto windows = make_windows(ps, m.features);
  const FeatureMatrix fm = extract_features(windows, m.features);
  const Matrix z = pca_transform(m.pca, apply_scaler(m.scaler, fm.x));

  std::vector<WindowPrediction> out(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out[i].t = windows[i].end_time;
    out[i].end_index = windows[i].end_index;
    out[i].truth_gesture = windows[i].label;
    out[i].truth_force = windows[i].force;
  }
  if (heads != Heads::Force) {
    const auto g = knn_predict_batch(m.knn, z);
    for (std::size_t i = 0; i < g.size(); ++i) out[i].gesture = g[i];
  }
  if (heads != Heads::Gesture) {
    LowpassFilter lp(m.models.output_cutoff_hz, m.output_rate_hz(), m.models.output_filter_order);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].raw_force = tree_predict(m.tree, z.row(i));
      out[i].filtered_force = lp.step(out[i].raw_force);
    }
  }
  return out;
}

std::vector<WindowPrediction> predict_sequence(const PipelineModel& m, const Sequence& s, Heads heads) {
  return predict_processed(m, prepare_with(m, s), heads);
}

}  // namespace emg
