#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a serial
// reference in kernels::serial and an OpenMP version in kernels::omp with
// identical results; tests compare the two and bench/ times them.

#include <cstddef>
#include <span>
#include <vector>

#include "emg/features.hpp"
#include "emg/matrix.hpp"

namespace emg::kernels {

struct Neighbor {
  double dist2 = 0.0;
  std::size_t index = 0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// The k rows of `points` closest to `query` (squared Euclidean), sorted by
/// (distance, row index).
std::vector<Neighbor> nearest_k(const Matrix& points, std::span<const double> query, std::size_t k);

struct Split {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;  // SSE reduction
};

/// Best midpoint split on one feature over `rows`, keeping both children at
/// least `min_leaf` rows. Ties keep the lowest threshold.
Split best_split_on_feature(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                            std::size_t feature, std::size_t min_leaf);

namespace serial {

/// Sample covariance (n - 1 denominator) of a column-centered matrix.
Matrix covariance(const Matrix& centered);
std::vector<std::vector<Neighbor>> knn_search(const Matrix& points, const Matrix& queries, std::size_t k);
/// Best split over all features; ties keep the lowest feature index.
Split best_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                 std::size_t min_leaf);
void feature_rows(std::span<const Window> windows, const FeatureConfig& cfg, Matrix& out);

}  // namespace serial

namespace omp {

Matrix covariance(const Matrix& centered);
std::vector<std::vector<Neighbor>> knn_search(const Matrix& points, const Matrix& queries, std::size_t k);
Split best_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                 std::size_t min_leaf);
void feature_rows(std::span<const Window> windows, const FeatureConfig& cfg, Matrix& out);

}  // namespace omp

}  // namespace emg::kernels
