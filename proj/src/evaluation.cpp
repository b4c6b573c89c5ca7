#include "emg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "emg/dataset_io.hpp"
#include "emg/error.hpp"
#include "emg/stats.hpp"

namespace emg {

std::vector<std::size_t> FoldPlan::training(std::size_t fold, std::size_t total) const {
  std::vector<bool> out_mask(total, false);
  for (auto i : held_out.at(fold)) out_mask.at(i) = true;
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < total; ++i) {
    if (!out_mask[i]) train.push_back(i);
  }
  return train;
}

FoldPlan kfold_by_sequence(std::span<const Sequence> seqs, int k, std::uint64_t seed) {
  if (k < 2) throw Error("cross-validation needs at least 2 folds");
  if (seqs.size() < static_cast<std::size_t>(k)) {
    throw Error("cannot split " + std::to_string(seqs.size()) + " sequences into " + std::to_string(k) + " folds");
  }
  std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    strata[{static_cast<int>(seqs[i].protocol), static_cast<int>(index_of(seqs[i].task))}].push_back(i);
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.held_out.assign(static_cast<std::size_t>(k), {});
  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  for (auto& [key, members] : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) {
      plan.held_out[next % static_cast<std::size_t>(k)].push_back(i);
      ++next;
    }
  }
  for (auto& fold : plan.held_out) {
    std::sort(fold.begin(), fold.end());
    std::vector<std::string> ids;
    for (auto i : fold) ids.push_back(seqs[i].id);
    plan.held_out_ids.push_back(std::move(ids));
  }
  return plan;
}

double accuracy(std::span<const Gesture> pred, std::span<const Gesture> truth) {
  if (pred.size() != truth.size()) throw Error("accuracy needs equal-length series");
  if (pred.empty()) throw Error("accuracy of an empty series");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

Confusion confusion_matrix(std::span<const Gesture> pred, std::span<const Gesture> truth) {
  if (pred.size() != truth.size()) throw Error("confusion matrix needs equal-length series");
  Confusion c{};
  for (std::size_t i = 0; i < pred.size(); ++i) ++c[index_of(truth[i])][index_of(pred[i])];
  return c;
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw Error("RMSE needs equal-length series");
  if (pred.empty()) throw Error("RMSE of an empty series");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

std::optional<double> mdape(std::span<const double> pred, std::span<const double> truth, double eps) {
  if (pred.size() != truth.size()) throw Error("MdAPE needs equal-length series");
  if (!(eps > 0.0)) throw Error("MdAPE epsilon must be positive");
  std::vector<double> ape;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::abs(truth[i]) >= eps) ape.push_back(100.0 * std::abs(pred[i] - truth[i]) / std::abs(truth[i]));
  }
  if (ape.empty()) return std::nullopt;
  return median(std::move(ape));
}

void EvalConfig::validate() const {
  if (folds < 2) throw ConfigError("eval.folds must be >= 2");
  if (!(mdape_eps > 0.0)) throw ConfigError("eval.mdape_eps must be positive");
}

namespace {

std::vector<Sequence> pick(std::span<const Sequence> seqs, std::span<const std::size_t> idx) {
  std::vector<Sequence> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(seqs[i]);
  return out;
}

std::vector<ChannelId> choose(const TrainingData& td, RankTarget target, const PipelineConfig& cfg, int channels,
                              const ChannelPolicy& policy) {
  if (policy.fixed) return *policy.fixed;
  return select_channels(rank_channels(td, target, cfg, policy.candidates), channels);
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct GrFold {
  double acc = 0.0;
  Confusion conf{};
  std::vector<TracePoint> traces;
};

GrFold score_gr(const PipelineModel& model, std::span<const Sequence> seqs, std::span<const std::size_t> held) {
  GrFold f;
  std::vector<Gesture> pred, truth;
  for (auto i : held) {
    for (const auto& w : predict_sequence(model, seqs[i], Heads::Gesture)) {
      pred.push_back(w.gesture);
      truth.push_back(w.truth_gesture);
      f.traces.push_back({seqs[i].id, w.t, w.truth_gesture, w.gesture, w.truth_force, 0.0});
    }
  }
  f.acc = accuracy(pred, truth);
  f.conf = confusion_matrix(pred, truth);
  return f;
}

struct FeFold {
  double rmse = 0.0;
  std::optional<double> mdape;
  std::vector<TracePoint> traces;
};

FeFold score_fe(const PipelineModel& model, std::span<const Sequence> seqs, std::span<const std::size_t> held,
                double eps) {
  FeFold f;
  std::vector<double> pred, truth;
  for (auto i : held) {
    for (const auto& w : predict_sequence(model, seqs[i], Heads::Force)) {
      pred.push_back(w.filtered_force);
      truth.push_back(w.truth_force);
      f.traces.push_back({seqs[i].id, w.t, w.truth_gesture, Gesture::Rest, w.truth_force, w.filtered_force});
    }
  }
  f.rmse = rmse(pred, truth);
  f.mdape = mdape(pred, truth, eps);
  return f;
}

std::optional<double> mean_defined(std::span<const std::optional<double>> v) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : v) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

}  // namespace

PipelineModel fit_fold(std::span<const Sequence> seqs, const FoldPlan& plan, std::size_t fold, const PipelineConfig& cfg,
                       RankTarget target, int channels, Heads heads, const ChannelPolicy& policy) {
  if (fold >= plan.held_out.size()) throw Error("fold index out of range");
  const auto train = pick(seqs, plan.training(fold, seqs.size()));
  const TrainingData td = prepare_training(train, cfg);
  return fit_pipeline(td, choose(td, target, cfg, channels, policy), cfg, heads);
}

GrReport evaluate_gr(std::span<const Sequence> seqs, const PipelineConfig& cfg, const FoldPlan& plan, int channels,
                     const ChannelPolicy& policy) {
  cfg.validate();
  GrReport r;
  for (std::size_t fold = 0; fold < plan.held_out.size(); ++fold) {
    const PipelineModel model = fit_fold(seqs, plan, fold, cfg, RankTarget::Gesture, channels, Heads::Gesture, policy);
    const auto& chosen = model.features.channels;
    auto f = score_gr(model, seqs, plan.held_out[fold]);
    r.fold_accuracy.push_back(f.acc);
    for (std::size_t a = 0; a < kGestureCount; ++a) {
      for (std::size_t b = 0; b < kGestureCount; ++b) r.confusion[a][b] += f.conf[a][b];
    }
    r.fold_channels.push_back(chosen);
    r.fold_pca_components.push_back(model.pca.retained);
    r.traces.insert(r.traces.end(), f.traces.begin(), f.traces.end());
  }
  r.mean_accuracy = mean(r.fold_accuracy);
  r.std_accuracy = sample_std(r.fold_accuracy);
  return r;
}

FeReport evaluate_fe(std::span<const Sequence> seqs, const PipelineConfig& cfg, const FoldPlan& plan, int channels,
                     double mdape_eps, const ChannelPolicy& policy) {
  cfg.validate();
  FeReport r;
  for (std::size_t fold = 0; fold < plan.held_out.size(); ++fold) {
    const PipelineModel model = fit_fold(seqs, plan, fold, cfg, RankTarget::Force, channels, Heads::Force, policy);
    const auto& chosen = model.features.channels;
    auto f = score_fe(model, seqs, plan.held_out[fold], mdape_eps);
    r.fold_rmse.push_back(f.rmse);
    r.fold_mdape.push_back(f.mdape);
    r.fold_channels.push_back(chosen);
    r.fold_pca_components.push_back(model.pca.retained);
    r.traces.insert(r.traces.end(), f.traces.begin(), f.traces.end());
  }
  r.mean_rmse = mean(r.fold_rmse);
  r.mean_mdape = mean_defined(r.fold_mdape);
  return r;
}

SweepReport channel_sweep(std::span<const Sequence> gr_seqs, const FoldPlan& gr_plan, std::span<const Sequence> fe_seqs,
                          const FoldPlan& fe_plan, const PipelineConfig& cfg, double mdape_eps, int k_min, int k_max) {
  cfg.validate();
  if (k_min < 1 || k_max > static_cast<int>(kChannelCount) || k_min > k_max) {
    throw Error("channel sweep range must lie within 1..8");
  }
  const auto counts = static_cast<std::size_t>(k_max - k_min + 1);
  std::vector<std::vector<double>> acc(counts), err(counts);
  std::vector<std::vector<std::optional<double>>> mdapes(counts);
  SweepReport rep;

  for (std::size_t fold = 0; fold < gr_plan.held_out.size(); ++fold) {
    const auto train = pick(gr_seqs, gr_plan.training(fold, gr_seqs.size()));
    const TrainingData td = prepare_training(train, cfg);
    const auto ranking = rank_channels(td, RankTarget::Gesture, cfg);
    for (int k = k_min; k <= k_max; ++k) {
      const auto model = fit_pipeline(td, select_channels(ranking, k), cfg, Heads::Gesture);
      acc[static_cast<std::size_t>(k - k_min)].push_back(score_gr(model, gr_seqs, gr_plan.held_out[fold]).acc);
    }
    rep.gr_rankings.push_back(ranking);
  }
  for (std::size_t fold = 0; fold < fe_plan.held_out.size(); ++fold) {
    const auto train = pick(fe_seqs, fe_plan.training(fold, fe_seqs.size()));
    const TrainingData td = prepare_training(train, cfg);
    const auto ranking = rank_channels(td, RankTarget::Force, cfg);
    for (int k = k_min; k <= k_max; ++k) {
      const auto model = fit_pipeline(td, select_channels(ranking, k), cfg, Heads::Force);
      auto f = score_fe(model, fe_seqs, fe_plan.held_out[fold], mdape_eps);
      err[static_cast<std::size_t>(k - k_min)].push_back(f.rmse);
      mdapes[static_cast<std::size_t>(k - k_min)].push_back(f.mdape);
    }
    rep.fe_rankings.push_back(ranking);
  }
  for (std::size_t i = 0; i < counts; ++i) {
    SweepRow row;
    row.channels = k_min + static_cast<int>(i);
    row.gr_accuracy = mean(acc[i]);
    row.gr_accuracy_std = sample_std(acc[i]);
    row.fe_rmse = mean(err[i]);
    row.fe_mdape = mean_defined(mdapes[i]);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string reference_gr_figure(int channels) {
  switch (channels) {
    case 1: return "~50%";
    case 2: return "~70%";
    case 3: return "~85%";
    default: return ">90%";
  }
}

std::string reference_fe_figure(int channels) {
  switch (channels) {
    case 1: return "~22%";
    case 2: return "~13%";
    case 3: return "~9%";
    default: return "<5%";
  }
}

void write_sweep_csv(const SweepReport& r, std::ostream& out) {
  out << "channels,gr_accuracy,gr_accuracy_std,gr_reference,fe_mdape_pct,fe_rmse,fe_reference\n";
  for (const auto& row : r.rows) {
    out << row.channels << ',' << format_real9(row.gr_accuracy) << ',' << format_real9(row.gr_accuracy_std) << ','
        << reference_gr_figure(row.channels) << ',' << (row.fe_mdape ? format_real9(*row.fe_mdape) : "NA") << ','
        << format_real9(row.fe_rmse) << ',' << reference_fe_figure(row.channels) << '\n';
  }
}

void write_trace_csv(std::span<const TracePoint> traces, std::ostream& out) {
  out << "sequence,t_s,truth_gesture,pred_gesture,truth_force,pred_force\n";
  for (const auto& p : traces) {
    out << p.sequence_id << ',' << format_real9(p.t) << ',' << gesture_name(p.truth_gesture) << ','
        << gesture_name(p.gesture) << ',' << format_real9(p.truth_force) << ',' << format_real9(p.force) << '\n';
  }
}

void write_confusion_csv(const Confusion& c, std::ostream& out) {
  out << "truth";
  for (auto g : kAllGestures) out << ',' << gesture_name(g);
  out << '\n';
  for (auto t : kAllGestures) {
    out << gesture_name(t);
    for (auto p : kAllGestures) out << ',' << c[index_of(t)][index_of(p)];
    out << '\n';
  }
}

}  // namespace emg
