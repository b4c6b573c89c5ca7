#pragma once

#include <optional>
#include <span>
#include <vector>

#include "emg/matrix.hpp"

namespace emg {

inline constexpr double kStdFloor = 1e-9;

/// Per-column standardization with population standard deviation.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dims() const { return mean.size(); }
  void apply_row(std::span<const double> in, std::span<double> out) const;
};

Scaler fit_scaler(const Matrix& x);
Matrix apply_scaler(const Scaler& s, const Matrix& x);

struct PcaModel {
  std::vector<double> mean;
  Matrix components;                     // all principal directions, one per row
  std::vector<double> explained_ratio;   // per component, non-increasing
  std::size_t retained = 0;

  std::size_t input_dims() const { return mean.size(); }

  /// Projects one row onto the first `count` components (default: retained).
  void project_row(std::span<const double> in, std::span<double> out,
                   std::optional<std::size_t> count = std::nullopt) const;
};

/// Eigendecomposition of the sample covariance (n - 1). Components sorted by
/// eigenvalue descending, each flipped so its largest-magnitude entry is
/// positive. Keeps the fewest components whose cumulative ratio reaches
/// `variance_target`.
PcaModel fit_pca(const Matrix& x, double variance_target = 0.95);

Matrix pca_transform(const PcaModel& m, const Matrix& x, std::optional<std::size_t> count = std::nullopt);

/// Maps component scores (first y.cols() components) back to input space.
Matrix pca_inverse(const PcaModel& m, const Matrix& y);

}  // namespace emg
