#include "emg/knn.hpp"

#include <array>
#include <cmath>
#include <string>

#include "emg/error.hpp"
#include "emg/kernels.hpp"

namespace emg {

KnnModel knn_fit(Matrix x, std::vector<Gesture> labels, int k) {
  if (k < 1) throw Error("KNN k must be >= 1");
  if (x.rows() != labels.size()) throw Error("KNN rows and labels differ in length");
  if (x.rows() < static_cast<std::size_t>(k)) {
    throw Error("KNN needs at least k = " + std::to_string(k) + " training rows, got " + std::to_string(x.rows()));
  }
  return KnnModel{std::move(x), std::move(labels), k};
}

namespace {

Gesture vote(const KnnModel& m, std::span<const kernels::Neighbor> nn) {
  std::array<int, kGestureCount> votes{};
  std::array<double, kGestureCount> dist{};
  for (const auto& n : nn) {
    const auto c = index_of(m.labels[n.index]);
    ++votes[c];
    dist[c] += std::sqrt(n.dist2);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kGestureCount; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && votes[c] > 0 && dist[c] < dist[best])) {
      best = c;
    }
  }
  return static_cast<Gesture>(best);
}

void check_dims(const KnnModel& m, std::size_t d) {
  if (d != m.dims()) {
    throw Error("KNN query has " + std::to_string(d) + " dimensions, model has " + std::to_string(m.dims()));
  }
}

}  // namespace

Gesture knn_predict(const KnnModel& m, std::span<const double> x) {
  check_dims(m, x.size());
  const auto nn = kernels::nearest_k(m.points, x, static_cast<std::size_t>(m.k));
  return vote(m, nn);
}

std::vector<Gesture> knn_predict_batch(const KnnModel& m, const Matrix& queries) {
  check_dims(m, queries.cols());
  const auto nn = kernels::omp::knn_search(m.points, queries, static_cast<std::size_t>(m.k));
  std::vector<Gesture> out(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) out[i] = vote(m, nn[i]);
  return out;
}

std::vector<Gesture> knn_predict_batch_serial(const KnnModel& m, const Matrix& queries) {
  check_dims(m, queries.cols());
  const auto nn = kernels::serial::knn_search(m.points, queries, static_cast<std::size_t>(m.k));
  std::vector<Gesture> out(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) out[i] = vote(m, nn[i]);
  return out;
}

}  // namespace emg
