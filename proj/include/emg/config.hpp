#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "emg/evaluation.hpp"
#include "emg/pipeline.hpp"
#include "emg/synthgen.hpp"

namespace emg {

/// Everything a CLI run depends on. One seed drives both data generation
/// and fold assignment.
struct RunConfig {
  std::uint64_t seed = 2024;
  PipelineConfig pipeline;
  EvalConfig eval;
  SynthSpec synth;

  /// Pushes `seed` into the sub-configs and validates all of them.
  void finalize();
};

/// INI-style file: optional top-level `seed = N`, then `[section]` tables of
/// `key = value`. Unknown sections or keys are rejected with ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text);

/// Applies one `section.key=value` override (or `seed=value`).
void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Writes the configuration in the same format load_run_config reads.
void write_run_config(const RunConfig& cfg, std::ostream& out);

}  // namespace emg
