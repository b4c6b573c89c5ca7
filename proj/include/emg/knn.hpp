#pragma once

#include <span>
#include <vector>

#include "emg/matrix.hpp"
#include "emg/types.hpp"

namespace emg {

/// Exact k-nearest-neighbour classifier over stored training rows.
struct KnnModel {
  Matrix points;
  std::vector<Gesture> labels;
  int k = 10;

  std::size_t dims() const { return points.cols(); }
};

KnnModel knn_fit(Matrix x, std::vector<Gesture> labels, int k = 10);

/// Majority vote among the k nearest rows (Euclidean; equal distances go to
/// the lower row index). A tied vote goes to the class with the smaller summed
/// neighbour distance, then to the lower class index.
Gesture knn_predict(const KnnModel& m, std::span<const double> x);

std::vector<Gesture> knn_predict_batch(const KnnModel& m, const Matrix& queries);
std::vector<Gesture> knn_predict_batch_serial(const KnnModel& m, const Matrix& queries);

}  // namespace emg
