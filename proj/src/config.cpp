#include "emg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "emg/dataset_io.hpp"
#include "emg/error.hpp"

namespace emg {

namespace pt = boost::property_tree;

namespace {

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Member>
Field real_field(Member member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { std::invoke(member, c) = to_real(k, v); },
          [member](const RunConfig& c) { return format_real9(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class Member>
Field int_field(Member member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            std::invoke(member, c) = static_cast<std::remove_reference_t<decltype(std::invoke(member, c))>>(to_int(k, v));
          },
          [member](const RunConfig& c) { return std::to_string(std::invoke(member, const_cast<RunConfig&>(c))); }};
}

template <class Member>
Field bool_field(Member member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { std::invoke(member, c) = to_bool(k, v); },
          [member](const RunConfig& c) { return std::string(std::invoke(member, const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

// Ordered by section then key, which is also the write order.
const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["seed"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                   const auto n = to_int(k, v);
                   if (n < 0) throw ConfigError("seed must be non-negative");
                   c.seed = static_cast<std::uint64_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};

    t["preprocess.lowpass_cutoff_hz"] = real_field([](RunConfig& c) -> double& { return c.pipeline.preprocess.lowpass_cutoff_hz; });
    t["preprocess.filter_order"] = int_field([](RunConfig& c) -> int& { return c.pipeline.preprocess.filter_order; });
    t["preprocess.mvc_percentile"] = real_field([](RunConfig& c) -> double& { return c.pipeline.preprocess.mvc_percentile; });
    t["preprocess.clip_max"] = real_field([](RunConfig& c) -> double& { return c.pipeline.preprocess.clip_max; });
    t["preprocess.working_rate_hz"] = real_field([](RunConfig& c) -> double& { return c.pipeline.preprocess.working_rate_hz; });

    t["features.window_len"] = int_field([](RunConfig& c) -> int& { return c.pipeline.features.window_len; });
    t["features.stride"] = int_field([](RunConfig& c) -> int& { return c.pipeline.features.stride; });
    t["features.ar_order"] = int_field([](RunConfig& c) -> int& { return c.pipeline.features.ar_order; });
    t["features.include_spatial"] = bool_field([](RunConfig& c) -> bool& { return c.pipeline.features.include_spatial; });

    t["selection.bins"] = int_field([](RunConfig& c) -> int& { return c.pipeline.selection.bins; });
    t["selection.force_bins"] = int_field([](RunConfig& c) -> int& { return c.pipeline.selection.force_bins; });
    t["selection.channels"] = int_field([](RunConfig& c) -> int& { return c.pipeline.selection.channels; });
    t["selection.target"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               if (v == "gesture") c.pipeline.selection.target = RankTarget::Gesture;
                               else if (v == "force") c.pipeline.selection.target = RankTarget::Force;
                               else throw ConfigError("'" + k + "' must be gesture or force");
                             },
                             [](const RunConfig& c) {
                               return std::string(c.pipeline.selection.target == RankTarget::Gesture ? "gesture" : "force");
                             }};

    t["reduction.variance_target"] = real_field([](RunConfig& c) -> double& { return c.pipeline.reduction.variance_target; });

    t["models.knn_k"] = int_field([](RunConfig& c) -> int& { return c.pipeline.models.knn_k; });
    t["models.min_leaf"] = int_field([](RunConfig& c) -> int& { return c.pipeline.models.min_leaf; });
    t["models.output_cutoff_hz"] = real_field([](RunConfig& c) -> double& { return c.pipeline.models.output_cutoff_hz; });
    t["models.output_filter_order"] = int_field([](RunConfig& c) -> int& { return c.pipeline.models.output_filter_order; });

    t["eval.folds"] = int_field([](RunConfig& c) -> int& { return c.eval.folds; });
    t["eval.mdape_eps"] = real_field([](RunConfig& c) -> double& { return c.eval.mdape_eps; });
    t["eval.gr_include_step"] = bool_field([](RunConfig& c) -> bool& { return c.eval.gr_include_step; });

    t["synth.subjects"] = int_field([](RunConfig& c) -> int& { return c.synth.subjects; });
    t["synth.hands"] = int_field([](RunConfig& c) -> int& { return c.synth.hands; });
    t["synth.sample_rate_hz"] = real_field([](RunConfig& c) -> double& { return c.synth.sample_rate_hz; });
    t["synth.force_rate_hz"] = real_field([](RunConfig& c) -> double& { return c.synth.force_rate_hz; });
    t["synth.mvc_amplitude"] = real_field([](RunConfig& c) -> double& { return c.synth.mvc_amplitude; });
    t["synth.noise_std"] = real_field([](RunConfig& c) -> double& { return c.synth.noise_std; });
    t["synth.carrier_jitter"] = real_field([](RunConfig& c) -> double& { return c.synth.carrier_jitter; });
    t["synth.carrier_spread_hz"] = real_field([](RunConfig& c) -> double& { return c.synth.carrier_spread_hz; });
    t["synth.carrier_hz"] = real_field([](RunConfig& c) -> double& { return c.synth.carrier_hz; });
    t["synth.crosstalk"] = real_field([](RunConfig& c) -> double& { return c.synth.crosstalk; });
    t["synth.gain_spread"] = real_field([](RunConfig& c) -> double& { return c.synth.gain_spread; });
    t["synth.strength_spread"] = real_field([](RunConfig& c) -> double& { return c.synth.strength_spread; });
    t["synth.force_noise_n"] = real_field([](RunConfig& c) -> double& { return c.synth.force_noise_n; });
    t["synth.rest_s"] = real_field([](RunConfig& c) -> double& { return c.synth.rest_s; });
    t["synth.ramp_s"] = real_field([](RunConfig& c) -> double& { return c.synth.ramp_s; });
    t["synth.hold_s"] = real_field([](RunConfig& c) -> double& { return c.synth.hold_s; });
    t["synth.phase_jitter_s"] = real_field([](RunConfig& c) -> double& { return c.synth.phase_jitter_s; });
    t["synth.step_levels"] = int_field([](RunConfig& c) -> int& { return c.synth.step_levels; });
    t["synth.step_increment_n"] = real_field([](RunConfig& c) -> double& { return c.synth.step_increment_n; });
    t["synth.step_level_s"] = real_field([](RunConfig& c) -> double& { return c.synth.step_level_s; });
    t["synth.step_ramp_s"] = real_field([](RunConfig& c) -> double& { return c.synth.step_ramp_s; });
    t["synth.step_lead_s"] = real_field([](RunConfig& c) -> double& { return c.synth.step_lead_s; });
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::finalize() {
  synth.seed = seed;
  pipeline.validate();
  eval.validate();
  synth.validate();
}

void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto& t = fields();
  auto it = t.find(dotted_key);
  if (it == t.end()) throw ConfigError("unknown config key '" + dotted_key + "'");
  it->second.set(cfg, dotted_key, value);
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      set_config_value(cfg, name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested tables are not supported ('" + name + "." + key + "')");
      set_config_value(cfg, name + "." + key, leaf.data());
    }
  }
  cfg.finalize();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void write_run_config(const RunConfig& cfg, std::ostream& out) {
  const auto& t = fields();
  out << "seed = " << t.at("seed").get(cfg) << '\n';
  std::string section;
  for (const auto& [key, f] : t) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << "\n[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << f.get(cfg) << '\n';
  }
}

}  // namespace emg
