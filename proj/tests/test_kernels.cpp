#include <doctest.h>

#include <numeric>
#include <random>

#include "emg/kernels.hpp"
#include "support.hpp"

using namespace emg;
namespace k = emg::kernels;

namespace {

Matrix centered(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  auto m = fixture::random_matrix(rows, cols, rng, 3.0);
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += m(r, c);
    mean /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) m(r, c) -= mean;
  }
  return m;
}

std::vector<Window> random_windows(std::size_t count, std::mt19937_64& rng) {
  std::array<std::vector<double>, kChannelCount> env;
  std::uniform_real_distribution<double> u(0.0, 1.5);
  const std::size_t n = count * 5 + 20;
  for (auto& ch : env) {
    ch.resize(n);
    for (double& v : ch) v = u(rng);
  }
  const auto ps = fixture::processed(env, std::vector<Gesture>(n, Gesture::WE), std::vector<double>(n, 0.3));
  return make_windows(ps, FeatureConfig{});
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("covariance: omp matches serial and a direct double loop") {
    std::mt19937_64 rng(11);
    const auto x = centered(503, 7, rng);
    const auto s = k::serial::covariance(x);
    const auto o = k::omp::covariance(x);
    REQUIRE(s.rows() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) {
        double direct = 0.0;
        for (std::size_t r = 0; r < 503; ++r) direct += x(r, i) * x(r, j);
        direct /= 502.0;
        CHECK(s(i, j) == doctest::Approx(direct).epsilon(1e-12));
        CHECK(o(i, j) == doctest::Approx(s(i, j)).epsilon(1e-12));
        CHECK(s(i, j) == s(j, i));
      }
    }
  }

  TEST_CASE("knn_search: omp matches serial, sorted by (distance, index)") {
    std::mt19937_64 rng(12);
    const auto pts = fixture::random_matrix(300, 5, rng);
    const auto q = fixture::random_matrix(64, 5, rng);
    const auto s = k::serial::knn_search(pts, q, 10);
    const auto o = k::omp::knn_search(pts, q, 10);
    REQUIRE(s.size() == 64);
    CHECK(s == o);
    for (std::size_t i = 0; i < 64; ++i) {
      // Full sort oracle.
      std::vector<k::Neighbor> all;
      for (std::size_t r = 0; r < 300; ++r) {
        double d = 0.0;
        for (std::size_t c = 0; c < 5; ++c) d += (pts(r, c) - q(i, c)) * (pts(r, c) - q(i, c));
        all.push_back({d, r});
      }
      std::sort(all.begin(), all.end());
      REQUIRE(s[i].size() == 10);
      for (std::size_t j = 0; j < 10; ++j) {
        CHECK(s[i][j].index == all[j].index);
        CHECK(s[i][j].dist2 == doctest::Approx(all[j].dist2).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("knn_search: duplicated points resolve by row index") {
    Matrix pts(6, 1);
    for (std::size_t r = 0; r < 6; ++r) pts(r, 0) = (r % 2 == 0) ? 1.0 : -1.0;
    Matrix q(1, 1);
    q(0, 0) = 0.0;
    const auto s = k::serial::knn_search(pts, q, 4);
    std::vector<std::size_t> idx;
    for (const auto& n : s[0]) idx.push_back(n.index);
    CHECK(idx == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(k::omp::knn_search(pts, q, 4) == s);
  }

  TEST_CASE("best_split: omp matches serial and an exhaustive scan") {
    std::mt19937_64 rng(13);
    const auto x = fixture::random_matrix(250, 6, rng);
    std::vector<double> y(250);
    for (std::size_t r = 0; r < 250; ++r) y[r] = (x(r, 3) > 0.2 ? 2.0 : -1.0) + 0.1 * x(r, 0);
    std::vector<std::size_t> rows(250);
    std::iota(rows.begin(), rows.end(), 0);

    const auto s = k::serial::best_split(x, y, rows, 5);
    const auto o = k::omp::best_split(x, y, rows, 5);
    REQUIRE(s.valid);
    CHECK(o.valid);
    CHECK(o.feature == s.feature);
    CHECK(o.threshold == s.threshold);
    CHECK(o.gain == s.gain);
    CHECK(s.feature == 3);

    // Brute force: every feature, every midpoint, SSE from scratch.
    double total = 0.0, mean = 0.0;
    for (double v : y) mean += v;
    mean /= 250.0;
    for (double v : y) total += (v - mean) * (v - mean);
    double best_gain = 0.0;
    for (std::size_t f = 0; f < 6; ++f) {
      std::vector<double> vals;
      for (std::size_t r = 0; r < 250; ++r) vals.push_back(x(r, f));
      std::sort(vals.begin(), vals.end());
      for (std::size_t i = 4; i + 5 < 250; ++i) {
        if (vals[i] == vals[i + 1]) continue;
        const double thr = 0.5 * (vals[i] + vals[i + 1]);
        double sl = 0, sr = 0, nl = 0, nr = 0;
        for (std::size_t r = 0; r < 250; ++r) {
          if (x(r, f) <= thr) { sl += y[r]; nl += 1; } else { sr += y[r]; nr += 1; }
        }
        double sse = 0.0;
        for (std::size_t r = 0; r < 250; ++r) {
          const double m = x(r, f) <= thr ? sl / nl : sr / nr;
          sse += (y[r] - m) * (y[r] - m);
        }
        best_gain = std::max(best_gain, total - sse);
      }
    }
    CHECK(s.gain == doctest::Approx(best_gain).epsilon(1e-9));
  }

  TEST_CASE("best_split: nothing to split when min_leaf cannot be met") {
    std::mt19937_64 rng(14);
    const auto x = fixture::random_matrix(9, 2, rng);
    std::vector<double> y(9, 0.0);
    y[0] = 1.0;
    std::vector<std::size_t> rows(9);
    std::iota(rows.begin(), rows.end(), 0);
    CHECK_FALSE(k::serial::best_split(x, y, rows, 5).valid);
    CHECK_FALSE(k::omp::best_split(x, y, rows, 5).valid);
  }

  TEST_CASE("feature_rows: omp is bit-identical to serial") {
    std::mt19937_64 rng(15);
    const auto windows = random_windows(97, rng);
    FeatureConfig cfg;
    Matrix s(windows.size(), cfg.feature_count());
    Matrix o(windows.size(), cfg.feature_count());
    k::serial::feature_rows(windows, cfg, s);
    k::omp::feature_rows(windows, cfg, o);
    CHECK(s == o);
    // Row r is the single-window feature vector.
    std::vector<double> one(cfg.feature_count());
    window_features(windows[40], cfg, one);
    for (std::size_t c = 0; c < one.size(); ++c) CHECK(s(40, c) == one[c]);
  }
}
