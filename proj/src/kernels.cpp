#include "emg/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "emg/error.hpp"

namespace emg::kernels {

std::vector<Neighbor> nearest_k(const Matrix& points, std::span<const double> query, std::size_t k) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  k = std::min(k, n);
  std::vector<Neighbor> heap;  // max-heap on (dist2, index)
  heap.reserve(k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points.row(i).data();
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = p[j] - query[j];
      s += diff * diff;
    }
    Neighbor cand{s, i};
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end());
    }
  }
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

Split best_split_on_feature(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                            std::size_t feature, std::size_t min_leaf) {
  Split best;
  const std::size_t n = rows.size();
  if (n < 2 * min_leaf || n < 2) return best;

  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = x(a, feature), vb = x(b, feature);
    return va < vb || (va == vb && a < b);
  });

  double total = 0.0;
  for (std::size_t r : order) total += y[r];
  const double base = total * total / static_cast<double>(n);

  double left = 0.0;
  const std::size_t lo = std::max<std::size_t>(min_leaf, 1);
  for (std::size_t s = 1; s < n; ++s) {
    left += y[order[s - 1]];
    if (s < lo || n - s < lo) continue;
    const double a = x(order[s - 1], feature);
    const double b = x(order[s], feature);
    if (!(a < b)) continue;
    const double right = total - left;
    const double gain = left * left / static_cast<double>(s) +
                        right * right / static_cast<double>(n - s) - base;
    if (!best.valid || gain > best.gain) {
      best.valid = true;
      best.feature = feature;
      best.threshold = a + (b - a) / 2.0;
      best.gain = gain;
    }
  }
  return best;
}

namespace {

Split reduce_splits(std::span<const Split> per_feature) {
  Split best;
  for (const auto& s : per_feature) {
    if (s.valid && (!best.valid || s.gain > best.gain)) best = s;
  }
  return best;
}

void check_centered_shape(const Matrix& m) {
  if (m.rows() < 2) throw Error("covariance needs at least 2 rows");
}

}  // namespace

namespace serial {

Matrix covariance(const Matrix& c) {
  check_centered_shape(c);
  const std::size_t d = c.cols();
  Matrix cov(d, d);
  const double denom = static_cast<double>(c.rows() - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < c.rows(); ++r) s += c(r, a) * c(r, b);
      cov(a, b) = cov(b, a) = s / denom;
    }
  }
  return cov;
}

std::vector<std::vector<Neighbor>> knn_search(const Matrix& points, const Matrix& queries, std::size_t k) {
  std::vector<std::vector<Neighbor>> out(queries.rows());
  for (std::size_t q = 0; q < queries.rows(); ++q) out[q] = nearest_k(points, queries.row(q), k);
  return out;
}

Split best_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                 std::size_t min_leaf) {
  std::vector<Split> per(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) per[f] = best_split_on_feature(x, y, rows, f, min_leaf);
  return reduce_splits(per);
}

void feature_rows(std::span<const Window> windows, const FeatureConfig& cfg, Matrix& out) {
  for (std::size_t i = 0; i < windows.size(); ++i) window_features(windows[i], cfg, out.row(i));
}

}  // namespace serial

namespace omp {

Matrix covariance(const Matrix& c) {
  check_centered_shape(c);
  const auto d = static_cast<long>(c.cols());
  Matrix cov(c.cols(), c.cols());
  const double denom = static_cast<double>(c.rows() - 1);
#pragma omp parallel for schedule(dynamic)
  for (long a = 0; a < d; ++a) {
    for (long b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < c.rows(); ++r) s += c(r, a) * c(r, b);
      cov(a, b) = cov(b, a) = s / denom;
    }
  }
  return cov;
}

std::vector<std::vector<Neighbor>> knn_search(const Matrix& points, const Matrix& queries, std::size_t k) {
  std::vector<std::vector<Neighbor>> out(queries.rows());
  const auto nq = static_cast<long>(queries.rows());
#pragma omp parallel for schedule(static)
  for (long q = 0; q < nq; ++q) out[q] = nearest_k(points, queries.row(q), k);
  return out;
}

Split best_split(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                 std::size_t min_leaf) {
  std::vector<Split> per(x.cols());
  const auto d = static_cast<long>(x.cols());
#pragma omp parallel for schedule(dynamic) if (rows.size() > 2048)
  for (long f = 0; f < d; ++f) per[f] = best_split_on_feature(x, y, rows, f, min_leaf);
  return reduce_splits(per);
}

void feature_rows(std::span<const Window> windows, const FeatureConfig& cfg, Matrix& out) {
  const auto n = static_cast<long>(windows.size());
  std::vector<int> failed(windows.size(), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      window_features(windows[i], cfg, out.row(i));
    } catch (...) {
      failed[i] = 1;
    }
  }
  for (long i = 0; i < n; ++i) {
    if (failed[i]) throw Error("feature extraction failed for window " + std::to_string(i));
  }
}

}  // namespace omp

}  // namespace emg::kernels
