#pragma once

#include <filesystem>

#include "emg/types.hpp"

namespace emg {

/// Reads a manifest and every CSV it references, then validates the result.
/// Errors name the sequence id and, for CSV problems, the line number.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes `dir/manifest.json` plus `<id>_emg.csv`, `<id>_force.csv` and
/// `<id>_labels.csv` per sequence. Reals are printed with 9 significant
/// digits. Refuses datasets that fail validation.
std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir);

/// Reads an EMG CSV (t_s,ch1..ch8). `label` is used in error messages.
std::vector<EmgFrame> read_emg_csv(std::istream& in, const std::string& label);

/// Prints a real with 9 significant digits, the dataset text format.
std::string format_real9(double v);

}  // namespace emg
