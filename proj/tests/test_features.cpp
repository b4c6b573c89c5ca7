#include <doctest.h>

#include <random>
#include <set>

#include "emg/burg.hpp"
#include "emg/error.hpp"
#include "emg/features.hpp"
#include "support.hpp"

using namespace emg;

namespace {

ProcessedSequence ramp_sequence(std::size_t len) {
  std::array<std::vector<double>, kChannelCount> env;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    env[c].resize(len);
    for (std::size_t i = 0; i < len; ++i) env[c][i] = 0.01 * static_cast<double>(i) + 0.1 * static_cast<double>(c);
  }
  std::vector<Gesture> labels(len, Gesture::Rest);
  std::vector<double> force(len);
  for (std::size_t i = 0; i < len; ++i) force[i] = static_cast<double>(i);
  return fixture::processed(env, labels, force);
}

std::vector<double> ar_series(std::size_t n, std::vector<double> a, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, 1.0);
  std::vector<double> x(n + 500, 0.0);
  for (std::size_t i = a.size(); i < x.size(); ++i) {
    double v = e(rng);
    for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * x[i - 1 - k];
    x[i] = v;
  }
  return {x.begin() + 500, x.end()};
}

Window window_of(std::vector<std::vector<double>> channels) {
  Window w;
  w.channels = channels.size();
  w.samples = channels[0].size();
  for (const auto& c : channels) w.block.insert(w.block.end(), c.begin(), c.end());
  return w;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("window counts, end indices, label and force rules") {
    FeatureConfig cfg;
    CHECK(make_windows(ramp_sequence(20), cfg).size() == 1);
    const auto w = make_windows(ramp_sequence(30), cfg);
    REQUIRE(w.size() == 3);
    CHECK(w[0].end_index == 19);
    CHECK(w[1].end_index == 24);
    CHECK(w[2].end_index == 29);
    CHECK(w[0].force == doctest::Approx(9.5).epsilon(1e-12));  // mean of 0..19
    CHECK(w[2].end_time == doctest::Approx(0.29));
    CHECK_THROWS_AS(make_windows(ramp_sequence(19), cfg), Error);

    auto ps = ramp_sequence(20);
    for (std::size_t i = 15; i < 20; ++i) ps.labels[i] = Gesture::HC;
    CHECK(make_windows(ps, cfg)[0].label == Gesture::HC);
    ps.labels[19] = Gesture::Rest;
    CHECK(make_windows(ps, cfg)[0].label == Gesture::Rest);
  }

  TEST_CASE("window blocks copy the selected channels") {
    FeatureConfig cfg;
    cfg.channels = parse_channel_list("8,2");
    const auto ps = ramp_sequence(25);
    const auto w = make_windows(ps, cfg);
    REQUIRE(w.size() == 2);
    CHECK(w[1].channels == 2);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(w[1].channel(0)[i] == ps.envelope[7][5 + i]);
      CHECK(w[1].channel(1)[i] == ps.envelope[1][5 + i]);
    }
  }

  TEST_CASE("constant series") {
    for (double c : {2.5, -1.5}) {
      const auto f = time_features(std::vector<double>(20, c), 4);
      REQUIRE(f.size() == 11);
      CHECK(f[0] == doctest::Approx(std::fabs(c)));
      CHECK(f[1] == doctest::Approx(std::fabs(c)));
      CHECK(f[2] == 0.0);
      CHECK(f[3] == 0.0);
      CHECK(f[4] == c);
      CHECK(f[5] == c);
      CHECK(f[6] == 0.0);
      for (std::size_t k = 7; k < 11; ++k) CHECK(f[k] == 0.0);
    }
  }

  TEST_CASE("hand arithmetic") {
    CHECK(time_features(std::vector<double>{3, 4}, 0)[1] == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(time_features(std::vector<double>{1, 3, 2}, 0)[6] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(time_features(std::vector<double>{1, 2, 3}, 4), Error);
  }

  TEST_CASE("every time-domain formula against a direct evaluation") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.3, 1.1);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(20);
      for (double& v : x) v = n(rng);
      const auto f = time_features(x, 4);
      const double var = oracle::pop_var(x);
      CHECK(f[0] == doctest::Approx(oracle::abs_mean(x)).epsilon(1e-9));
      CHECK(f[1] == doctest::Approx(oracle::rms(x)).epsilon(1e-9));
      CHECK(f[2] == doctest::Approx(var).epsilon(1e-9));
      CHECK(f[3] == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
      CHECK(f[4] == *std::max_element(x.begin(), x.end()));
      CHECK(f[5] == *std::min_element(x.begin(), x.end()));
      CHECK(f[6] == doctest::Approx(oracle::wl(x)).epsilon(1e-9));
      CHECK(f[3] * f[3] == doctest::Approx(f[2]).epsilon(1e-12));
    }
  }

  TEST_CASE("scale equivariance") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> x(20);
    for (double& v : x) v = u(rng);
    const double a = 3.7;
    std::vector<double> ax(x);
    for (double& v : ax) v *= a;
    const auto f = time_features(x, 4);
    const auto g = time_features(ax, 4);
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u, 6u}) CHECK(g[i] == doctest::Approx(a * f[i]).epsilon(1e-9));
    CHECK(g[2] == doctest::Approx(a * a * f[2]).epsilon(1e-9));
    for (std::size_t k = 7; k < 11; ++k) CHECK(g[k] == doctest::Approx(f[k]).epsilon(1e-6).scale(1.0));
    // AR works on the mean-removed window, so an offset changes nothing.
    std::vector<double> shifted(x);
    for (double& v : shifted) v += 5.0;
    const auto h = time_features(shifted, 4);
    for (std::size_t k = 7; k < 11; ++k) CHECK(h[k] == doctest::Approx(f[k]).epsilon(1e-6).scale(1.0));
  }

  TEST_CASE("Burg recovers AR(1) 0.9 and matches the closed form") {
    const auto x = ar_series(2000, {0.9}, 42);
    const auto a = burg_ar(x, 1);
    REQUIRE(a.size() == 1);
    CHECK(std::fabs(a[0] - 0.9) <= 0.05);
    // Order 1: reflection = 2 sum x[n] x[n-1] / sum (x[n]^2 + x[n-1]^2).
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      num += x[i] * x[i - 1];
      den += x[i] * x[i] + x[i - 1] * x[i - 1];
    }
    CHECK(a[0] == doctest::Approx(2.0 * num / den).epsilon(1e-12));
  }

  TEST_CASE("Burg recovers a known AR(2)") {
    const auto x = ar_series(20000, {1.2, -0.5}, 7);
    const auto a = burg_ar(x, 2);
    CHECK(a[0] == doctest::Approx(1.2).epsilon(0.05 / 1.2));
    CHECK(a[1] == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
    CHECK_THROWS_AS(burg_ar(std::vector<double>{1.0, 2.0}, 2), Error);
  }

  TEST_CASE("spatial features") {
    SUBCASE("two constant channels 1 and 3") {
      const auto s = spatial_features(window_of({std::vector<double>(20, 1.0), std::vector<double>(20, 3.0)}));
      CHECK(s[0] == doctest::Approx(2.0));
      CHECK(s[1] == doctest::Approx(std::sqrt(5.0)));
      CHECK(s[2] == doctest::Approx(1.0));
      CHECK(s[3] == doctest::Approx(1.0));
      CHECK(s[4] == 3.0);
      CHECK(s[5] == 1.0);
    }
    SUBCASE("single channel collapses") {
      std::vector<double> x(20);
      for (std::size_t i = 0; i < 20; ++i) x[i] = 0.1 * static_cast<double>(i);
      const auto s = spatial_features(window_of({x}));
      const double m = oracle::abs_mean(x);
      CHECK(s[0] == doctest::Approx(m));
      CHECK(s[1] == doctest::Approx(m));
      CHECK(s[4] == doctest::Approx(m));
      CHECK(s[5] == doctest::Approx(m));
      CHECK(s[2] == 0.0);
      CHECK(s[3] == 0.0);
    }
    SUBCASE("identical channels") {
      std::vector<double> x(20);
      for (std::size_t i = 0; i < 20; ++i) x[i] = std::sin(0.3 * static_cast<double>(i)) + 2.0;
      const auto s = spatial_features(window_of({x, x, x}));
      CHECK(s[2] == doctest::Approx(0.0).scale(1.0));
      CHECK(s[3] == doctest::Approx(0.0).scale(1.0));
      CHECK(s[4] == s[5]);
    }
  }

  TEST_CASE("feature counts and names") {
    FeatureConfig cfg;
    cfg.channels = parse_channel_list("2,5,8");
    CHECK(cfg.feature_count() == 39);
    cfg.channels = all_channels();
    CHECK(cfg.feature_count() == 94);
    const auto names = cfg.feature_names();
    REQUIRE(names.size() == 94);
    CHECK(names.front() == "ch1_MAV");
    CHECK(names[10] == "ch1_AR4");
    CHECK(names[11] == "ch2_MAV");
    CHECK(names.back() == "spatial_MIN");
    CHECK(cfg.feature_names() == names);
    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());
  }

  TEST_CASE("extract_features: shape, empty input, parallel equals serial") {
    FeatureConfig cfg;
    cfg.channels = parse_channel_list("2,5,8");
    CHECK_THROWS_AS(extract_features({}, cfg), Error);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    auto ps = ramp_sequence(400);
    for (auto& ch : ps.envelope) {
      for (double& v : ch) v = u(rng);
    }
    const auto windows = make_windows(ps, cfg);
    const auto a = extract_features(windows, cfg);
    const auto b = extract_features_serial(windows, cfg);
    CHECK(a.rows() == windows.size());
    CHECK(a.x.cols() == 39);
    CHECK(a.x == b.x);
    CHECK(a.names == cfg.feature_names());
    CHECK(a.labels == b.labels);
    CHECK(a.force == b.force);
  }
}
