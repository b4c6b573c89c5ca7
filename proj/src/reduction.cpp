#include "emg/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "emg/error.hpp"
#include "emg/kernels.hpp"

namespace emg {

Scaler fit_scaler(const Matrix& x) {
  if (x.rows() < 2) throw Error("scaler needs at least 2 rows");
  const std::size_t n = x.rows(), d = x.cols();
  Scaler s;
  s.mean.assign(d, 0.0);
  s.std.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += x(r, c);
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double e = x(r, c) - s.mean[c];
      s.std[c] += e * e;
    }
  }
  for (auto& v : s.std) v = std::max(std::sqrt(v / static_cast<double>(n)), kStdFloor);
  return s;
}

void Scaler::apply_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dims() || out.size() != dims()) throw Error("scaler dimension mismatch");
  for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean[c]) / std[c];
}

Matrix apply_scaler(const Scaler& s, const Matrix& x) {
  if (x.cols() != s.dims()) {
    throw Error("scaler expects " + std::to_string(s.dims()) + " columns, got " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) s.apply_row(x.row(r), out.row(r));
  return out;
}

PcaModel fit_pca(const Matrix& x, double variance_target) {
  if (x.rows() < 2) throw Error("PCA needs at least 2 rows");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) throw Error("PCA variance target must be in (0, 1]");
  const std::size_t n = x.rows(), d = x.cols();

  PcaModel m;
  m.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) m.mean[c] += x(r, c);
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  Matrix centered(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) centered(r, c) = x(r, c) - m.mean[c];
  }
  // Each covariance entry is summed by one thread in row order, so this is
  // bit-identical to kernels::serial::covariance.
  const Matrix cov = kernels::omp::covariance(centered);

  Eigen::MatrixXd c(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) c(a, b) = cov(a, b);
  }
  const double trace = c.trace();
  if (!(trace > 1e-300)) throw Error("PCA on a degenerate (all-constant) matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");
  const auto& evals = solver.eigenvalues();   // ascending
  const auto& evecs = solver.eigenvectors();  // columns

  m.components = Matrix(d, d);
  m.explained_ratio.resize(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) total += std::max(evals(static_cast<Eigen::Index>(i)), 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto src = static_cast<Eigen::Index>(d - 1 - i);
    m.explained_ratio[i] = std::max(evals(src), 0.0) / total;
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(evecs(static_cast<Eigen::Index>(j), src)) > std::abs(evecs(static_cast<Eigen::Index>(arg), src))) {
        arg = j;
      }
    }
    const double sign = evecs(static_cast<Eigen::Index>(arg), src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) m.components(i, j) = sign * evecs(static_cast<Eigen::Index>(j), src);
  }
  double cum = 0.0;
  m.retained = d;
  for (std::size_t i = 0; i < d; ++i) {
    cum += m.explained_ratio[i];
    if (cum >= variance_target) {
      m.retained = i + 1;
      break;
    }
  }
  return m;
}

void PcaModel::project_row(std::span<const double> in, std::span<double> out,
                           std::optional<std::size_t> count) const {
  const std::size_t k = count.value_or(retained);
  if (in.size() != input_dims()) throw Error("PCA input dimension mismatch");
  if (out.size() != k || k > components.rows()) throw Error("PCA output dimension mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    const auto comp = components.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) s += (in[j] - mean[j]) * comp[j];
    out[i] = s;
  }
}

Matrix pca_transform(const PcaModel& m, const Matrix& x, std::optional<std::size_t> count) {
  if (x.cols() != m.input_dims()) {
    throw Error("PCA expects " + std::to_string(m.input_dims()) + " columns, got " + std::to_string(x.cols()));
  }
  const std::size_t k = count.value_or(m.retained);
  Matrix out(x.rows(), k);
  const auto n = static_cast<long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) m.project_row(x.row(r), out.row(r), k);
  return out;
}

Matrix pca_inverse(const PcaModel& m, const Matrix& y) {
  if (y.cols() > m.components.rows()) throw Error("more scores than PCA components");
  const std::size_t d = m.input_dims();
  Matrix out(y.rows(), d);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = m.mean[j];
      for (std::size_t i = 0; i < y.cols(); ++i) s += y(r, i) * m.components(i, j);
      out(r, j) = s;
    }
  }
  return out;
}

}  // namespace emg
