#pragma once

// Test-side oracles and fixtures. The oracles are written independently of
// the library code they check: plain loops, full sorts, closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "emg/evaluation.hpp"
#include "emg/pipeline.hpp"
#include "emg/synthgen.hpp"

namespace oracle {

inline double abs_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s / static_cast<double>(x.size());
}

inline double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Two-pass population variance.
inline double pop_var(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

inline double wl(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += std::fabs(x[i] - x[i - 1]);
  return s;
}

// I(A;B) in bits from a joint count table.
inline double mi_from_joint(const std::vector<std::vector<double>>& counts) {
  double n = 0.0;
  std::vector<double> ra(counts.size(), 0.0), cb(counts[0].size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      n += counts[i][j];
      ra[i] += counts[i][j];
      cb[j] += counts[i][j];
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] == 0.0) continue;
      const double pij = counts[i][j] / n;
      mi += pij * std::log2(pij / ((ra[i] / n) * (cb[j] / n)));
    }
  }
  return mi;
}

// Full sort of every training row, then the documented vote rules.
inline emg::Gesture brute_knn(const emg::Matrix& pts, const std::vector<emg::Gesture>& labels,
                              std::span<const double> q, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < pts.cols(); ++c) s += (pts(r, c) - q[c]) * (pts(r, c) - q[c]);
    d.emplace_back(s, r);
  }
  std::sort(d.begin(), d.end());
  std::array<int, emg::kGestureCount> votes{};
  std::array<double, emg::kGestureCount> dist{};
  for (int i = 0; i < k; ++i) {
    const auto g = emg::index_of(labels[d[static_cast<std::size_t>(i)].second]);
    votes[g] += 1;
    dist[g] += std::sqrt(d[static_cast<std::size_t>(i)].first);
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < emg::kGestureCount; ++g) {
    if (votes[g] > votes[best] || (votes[g] == votes[best] && votes[g] > 0 && dist[g] < dist[best])) best = g;
  }
  return static_cast<emg::Gesture>(best);
}

// Eigenvalues of a symmetric 3x3 matrix from its characteristic polynomial
// (trigonometric root form), descending.
inline std::array<double, 3> sym3_eigenvalues(const std::array<std::array<double, 3>, 3>& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::array<std::array<double, 3>, 3> b{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  }
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                     b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e1, 3.0 * q - e1 - e3, e3};
}

}  // namespace oracle

namespace fixture {

inline emg::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  emg::Matrix m(rows, cols);
  for (double& v : m.data()) v = n(rng);
  return m;
}

// Envelope-level sequence; every channel given explicitly.
inline emg::ProcessedSequence processed(const std::array<std::vector<double>, emg::kChannelCount>& env,
                                        std::vector<emg::Gesture> labels, std::vector<double> force) {
  emg::ProcessedSequence ps;
  ps.id = "fx";
  ps.subject_id = "S0";
  ps.sample_rate_hz = 100.0;
  const auto n = env[0].size();
  ps.t.resize(n);
  for (std::size_t i = 0; i < n; ++i) ps.t[i] = static_cast<double>(i) / 100.0;
  ps.envelope = env;
  ps.force = force;
  ps.force_newtons = std::move(force);
  ps.labels = std::move(labels);
  return ps;
}

inline emg::Sequence constant_sequence(std::size_t frames, double rate, double value, emg::Gesture task) {
  emg::Sequence s;
  s.id = "const";
  s.subject_id = "S0";
  s.task = task;
  s.sample_rate_hz = rate;
  for (std::size_t i = 0; i < frames; ++i) {
    emg::EmgFrame f;
    f.t = static_cast<double>(i) / rate;
    f.values.fill(value);
    s.emg.push_back(f);
  }
  s.force = {{0.0, 0.0}, {static_cast<double>(frames) / rate, 0.0}};
  return s;
}

// Small generator settings that keep pipeline tests fast.
inline emg::SynthSpec small_spec(int subjects = 2, int hands = 1) {
  emg::SynthSpec s;
  s.subjects = subjects;
  s.hands = hands;
  return s;
}

// 2 subjects x 1 hand, generated once per test binary.
inline const emg::Dataset& small_dataset() {
  static const emg::Dataset d = emg::generate_dataset(small_spec());
  return d;
}

// Pipeline fitted on small_dataset() with the default configuration.
inline const emg::PipelineModel& small_model() {
  static const emg::PipelineModel m = emg::fit_pipeline(small_dataset().sequences, emg::PipelineConfig{});
  return m;
}

}  // namespace fixture
