// emgctl: generate | train | eval | sweep | stream | inspect

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emg/config.hpp"
#include "emg/dataset_io.hpp"
#include "emg/error.hpp"
#include "emg/evaluation.hpp"
#include "emg/pipeline.hpp"
#include "emg/stream.hpp"
#include "emg/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  long long seed = -1;
  std::string channels;
  std::string out;
  std::string manifest;
  std::string model;
  std::string input;
  int count = 0;
  bool defaults = false;
};

// Precedence: built-in defaults < config file < --set < --seed.
emg::RunConfig resolve_config(const Options& o) {
  emg::RunConfig cfg = o.config_path.empty() ? emg::RunConfig{} : emg::load_run_config(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw emg::ConfigError("--set expects key=value, got '" + kv + "'");
    emg::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  cfg.finalize();
  return cfg;
}

emg::Dataset open_dataset(const std::string& manifest) {
  if (manifest.empty()) throw emg::ConfigError("--manifest is required");
  if (!fs::is_regular_file(manifest)) throw emg::ConfigError("manifest not found: " + manifest);
  return emg::load_dataset(manifest);
}

std::vector<emg::Sequence> gr_sequences(const emg::Dataset& d, const emg::RunConfig& cfg) {
  if (cfg.eval.gr_include_step) return d.sequences;
  std::vector<emg::Sequence> out;
  for (const auto& s : d.sequences) {
    if (s.protocol == emg::Protocol::Mvc) out.push_back(s);
  }
  return out;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw emg::Error("cannot write " + p.string());
  return f;
}

fs::path out_dir(const Options& o, const char* fallback) {
  fs::path dir = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

std::string pct(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v << '%';
  return s.str();
}

int cmd_generate(const Options& o) {
  const auto cfg = resolve_config(o);
  const fs::path dir = o.out.empty() ? fs::path("data") : fs::path(o.out);
  const auto d = emg::generate_dataset(cfg.synth);
  const auto manifest = emg::save_dataset(d, dir);
  std::size_t frames = 0, forces = 0;
  for (const auto& s : d.sequences) {
    frames += s.emg.size();
    forces += s.force.size();
  }
  std::cout << d.sequences.size() << " sequences, " << frames << " EMG frames, " << forces << " force samples\n"
            << "manifest: " << manifest.string() << '\n';
  return 0;
}

int cmd_train(const Options& o) {
  const auto cfg = resolve_config(o);
  const auto d = open_dataset(o.manifest);
  const fs::path out = o.out.empty() ? fs::path("model.json") : fs::path(o.out);

  const auto td = emg::prepare_training(d.sequences, cfg.pipeline);
  std::vector<emg::ChannelId> channels;
  if (!o.channels.empty()) {
    channels = emg::parse_channel_list(o.channels);
  } else {
    const auto r = emg::rank_channels(td, cfg.pipeline.selection.target, cfg.pipeline);
    channels.assign(r.order.begin(), r.order.begin() + cfg.pipeline.selection.channels);
  }
  const auto model = emg::fit_pipeline(td, channels, cfg.pipeline);
  emg::save_model(model, out);

  // Resubstitution metrics, for orientation only.
  std::vector<emg::Gesture> pg, tg;
  std::vector<double> pf, tf;
  for (const auto& ps : td.sequences) {
    for (const auto& w : emg::predict_processed(model, ps)) {
      pg.push_back(w.gesture);
      tg.push_back(w.truth_gesture);
      pf.push_back(w.filtered_force);
      tf.push_back(w.truth_force);
    }
  }
  std::cout << "channels: " << emg::format_channel_list(model.features.channels) << '\n'
            << "features: " << model.features.feature_count() << " -> PCA components: " << model.pca.retained << '\n'
            << "training windows: " << tg.size() << '\n'
            << "training accuracy: " << pct(emg::accuracy(pg, tg)) << '\n'
            << "training force RMSE: " << emg::rmse(pf, tf) << '\n'
            << "model: " << out.string() << '\n';
  return 0;
}

int cmd_eval(const Options& o) {
  const auto cfg = resolve_config(o);
  const auto d = open_dataset(o.manifest);
  const fs::path dir = out_dir(o, "eval");

  emg::ChannelPolicy policy;
  if (!o.channels.empty()) policy.fixed = emg::parse_channel_list(o.channels);
  const int count = policy.fixed ? static_cast<int>(policy.fixed->size())
                                 : (o.count > 0 ? o.count : cfg.pipeline.selection.channels);

  const auto gr_seqs = gr_sequences(d, cfg);
  const auto gr_plan = emg::kfold_by_sequence(gr_seqs, cfg.eval.folds, cfg.seed);
  const auto fe_plan = emg::kfold_by_sequence(d.sequences, cfg.eval.folds, cfg.seed);

  const auto gr = emg::evaluate_gr(gr_seqs, cfg.pipeline, gr_plan, count, policy);
  const auto fe = emg::evaluate_fe(d.sequences, cfg.pipeline, fe_plan, count, cfg.eval.mdape_eps, policy);

  {
    auto f = open_out(dir / "confusion.csv");
    emg::write_confusion_csv(gr.confusion, f);
  }
  {
    auto f = open_out(dir / "gr_trace.csv");
    emg::write_trace_csv(gr.traces, f);
  }
  {
    auto f = open_out(dir / "fe_trace.csv");
    emg::write_trace_csv(fe.traces, f);
  }
  std::ostringstream summary;
  summary << "channels: " << count << '\n';
  summary << "fold,gr_channels,gr_accuracy,gr_pca,fe_channels,fe_rmse,fe_mdape_pct,fe_pca\n";
  for (std::size_t i = 0; i < gr.fold_accuracy.size(); ++i) {
    summary << i << ',' << emg::format_channel_list(gr.fold_channels[i]) << ',' << gr.fold_accuracy[i] << ','
            << gr.fold_pca_components[i] << ',' << emg::format_channel_list(fe.fold_channels[i]) << ','
            << fe.fold_rmse[i] << ',';
    if (fe.fold_mdape[i]) summary << *fe.fold_mdape[i];
    summary << ',' << fe.fold_pca_components[i] << '\n';
  }
  summary << "GR accuracy: " << gr.mean_accuracy << " (std " << gr.std_accuracy << ")\n";
  summary << "FE RMSE: " << fe.mean_rmse << '\n';
  summary << "FE MdAPE: " << (fe.mean_mdape ? std::to_string(*fe.mean_mdape) + "%" : std::string("n/a")) << '\n';
  {
    auto f = open_out(dir / "summary.txt");
    f << summary.str();
  }
  std::cout << summary.str() << "reports: " << dir.string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto cfg = resolve_config(o);
  const auto d = open_dataset(o.manifest);
  const fs::path dir = out_dir(o, "sweep");

  const auto gr_seqs = gr_sequences(d, cfg);
  const auto gr_plan = emg::kfold_by_sequence(gr_seqs, cfg.eval.folds, cfg.seed);
  const auto fe_plan = emg::kfold_by_sequence(d.sequences, cfg.eval.folds, cfg.seed);
  const auto r = emg::channel_sweep(gr_seqs, gr_plan, d.sequences, fe_plan, cfg.pipeline, cfg.eval.mdape_eps);

  {
    auto f = open_out(dir / "sweep.csv");
    emg::write_sweep_csv(r, f);
  }
  {
    auto f = open_out(dir / "rankings.csv");
    f << "fold,target,order\n";
    for (std::size_t i = 0; i < r.gr_rankings.size(); ++i) {
      f << i << ",gesture,\"" << emg::format_channel_list(r.gr_rankings[i].order) << "\"\n";
      f << i << ",force,\"" << emg::format_channel_list(r.fe_rankings[i].order) << "\"\n";
    }
  }
  emg::write_sweep_csv(r, std::cout);
  std::cout << "reports: " << dir.string() << '\n';
  return 0;
}

int cmd_stream(const Options& o) {
  if (o.model.empty()) throw emg::ConfigError("--model is required");
  if (!fs::is_regular_file(o.model)) throw emg::ConfigError("model not found: " + o.model);
  auto model = std::make_shared<const emg::PipelineModel>(emg::load_model(o.model));
  emg::StreamEngine engine(model);

  std::vector<emg::EmgFrame> frames;
  if (o.input.empty() || o.input == "-") {
    frames = emg::read_emg_csv(std::cin, "<stdin>");
  } else {
    std::ifstream in(o.input);
    if (!in) throw emg::ConfigError("input not found: " + o.input);
    frames = emg::read_emg_csv(in, o.input);
  }

  std::ofstream file;
  if (!o.out.empty()) file = open_out(o.out);
  std::ostream& out = o.out.empty() ? std::cout : file;
  emg::write_control_header(out);
  for (const auto& f : frames) {
    if (auto c = engine.push(f)) emg::write_control_row(*c, out);
  }
  if (engine.frames_seen() >= 100) {
    const auto lat = engine.latency_report();
    std::cerr << "frames: " << lat.frames << ", push latency ms min/median/p99: " << lat.min_ms << '/'
              << lat.median_ms << '/' << lat.p99_ms << '\n';
  }
  return 0;
}

int cmd_inspect(const Options& o) {
  if (!o.model.empty()) {
    if (!fs::is_regular_file(o.model)) throw emg::ConfigError("model not found: " + o.model);
    const auto m = emg::load_model(o.model);
    std::cout << "schema_version: " << m.schema_version << '\n'
              << "working rate: " << m.working_rate_hz << " Hz (decimation " << m.downsample_factor << ")\n"
              << "channels: " << emg::format_channel_list(m.features.channels) << '\n'
              << "features: " << m.features.feature_count() << ", PCA components: " << m.pca.retained << '\n'
              << "knn: k=" << m.knn.k << ", " << m.knn.labels.size() << " stored points\n"
              << "tree: " << m.tree.leaf_count() << " leaves, depth " << m.tree.depth() << '\n'
              << "force norm: offset " << m.force_norm.offset << " N, scale " << m.force_norm.scale << " N\n";
    return 0;
  }
  if (!o.manifest.empty()) {
    const auto d = open_dataset(o.manifest);
    std::cout << "sequences: " << d.sequences.size() << '\n' << "id,subject,hand,task,protocol,rate_hz,frames,force\n";
    for (const auto& s : d.sequences) {
      std::cout << s.id << ',' << s.subject_id << ',' << emg::hand_name(s.hand) << ',' << emg::gesture_name(s.task)
                << ',' << emg::protocol_name(s.protocol) << ',' << s.sample_rate_hz << ',' << s.emg.size() << ','
                << s.force.size() << '\n';
    }
    return 0;
  }
  emg::write_run_config(resolve_config(o), std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMG wrist-intent pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "config file (key = value, [section] tables)");
  app.add_option("--set", o.overrides, "override one config value, section.key=value (repeatable)");
  app.add_option("--seed", o.seed, "root seed; overrides the config file")->check(CLI::NonNegativeNumber);

  auto* gen = app.add_subcommand("generate", "write the synthetic dataset");
  gen->add_option("--out", o.out, "output directory (default: data)");

  auto* train = app.add_subcommand("train", "fit the pipeline on every sequence of a dataset");
  train->add_option("--manifest", o.manifest, "dataset manifest.json")->required();
  train->add_option("--channels", o.channels, "fixed channel list, e.g. 2,5,8 (default: mRMR)");
  train->add_option("--out", o.out, "model file (default: model.json)");

  auto* eval = app.add_subcommand("eval", "5-fold gesture and force evaluation");
  eval->add_option("--manifest", o.manifest, "dataset manifest.json")->required();
  eval->add_option("--channels", o.channels, "fixed channel list (default: mRMR per fold)");
  eval->add_option("--count", o.count, "number of mRMR channels (default: selection.channels)")
      ->check(CLI::Range(1, 8));
  eval->add_option("--out", o.out, "report directory (default: eval)");

  auto* sweep = app.add_subcommand("sweep", "accuracy and MdAPE for 1..8 channels");
  sweep->add_option("--manifest", o.manifest, "dataset manifest.json")->required();
  sweep->add_option("--out", o.out, "report directory (default: sweep)");

  auto* stream = app.add_subcommand("stream", "frame-by-frame inference on an EMG CSV");
  stream->add_option("--model", o.model, "model file")->required();
  stream->add_option("--input", o.input, "EMG CSV (t_s,ch1..ch8); default stdin");
  stream->add_option("--out", o.out, "control CSV (default stdout)");

  auto* inspect = app.add_subcommand("inspect", "describe a model, a dataset, or the effective config");
  inspect->add_option("--model", o.model, "model file");
  inspect->add_option("--manifest", o.manifest, "dataset manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*sweep) return cmd_sweep(o);
    if (*stream) return cmd_stream(o);
    if (*inspect) return cmd_inspect(o);
  } catch (const emg::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
