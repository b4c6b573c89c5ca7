#include <doctest.h>

#include <cmath>
#include <numbers>

#include "emg/error.hpp"
#include "emg/preprocess.hpp"
#include "emg/signal.hpp"
#include "emg/stats.hpp"
#include "emg/synthgen.hpp"
#include "support.hpp"

using namespace emg;

namespace {

// Digital Butterworth magnitude after a prewarped bilinear transform.
double butter_mag(double f, double fc, double fs, int order) {
  const double r = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2.0 * order));
}

double steady_amplitude(double f, double fc, double fs, int order) {
  std::vector<double> x(4000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs + 0.3);
  const auto y = lowpass_causal(x, fc, fs, order);
  // RMS over a whole number of periods (2000 samples) times sqrt(2).
  double ss = 0.0;
  for (std::size_t i = 2000; i < y.size(); ++i) ss += y[i] * y[i];
  return std::sqrt(2.0 * ss / 2000.0);
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("rectify") {
    CHECK(rectify(std::vector<double>{-1, 2, -3}) == std::vector<double>{1, 2, 3});
    CHECK(rectify(std::vector<double>(5, 0.0)) == std::vector<double>(5, 0.0));
    const std::vector<double> pos{0.5, 3, 7};
    CHECK(rectify(pos) == pos);
  }

  TEST_CASE("constant input passes unchanged from the first sample") {
    for (int order : {2, 4, 6}) {
      const auto y = lowpass_causal(std::vector<double>(300, 4.25), 5.0, 100.0, order);
      for (double v : y) CHECK(v == doctest::Approx(4.25).epsilon(1e-12));
    }
  }

  TEST_CASE("25 Hz tone at fs 100 is attenuated per the analytic response") {
    const double a = steady_amplitude(25.0, 5.0, 100.0, 2);
    CHECK(a <= 0.05);
    CHECK(a == doctest::Approx(butter_mag(25.0, 5.0, 100.0, 2)).epsilon(1e-3));
  }

  TEST_CASE("magnitude at the cutoff is 1/sqrt(2) for every order") {
    for (int order : {2, 4}) {
      CHECK(steady_amplitude(5.0, 5.0, 100.0, order) == doctest::Approx(std::sqrt(0.5)).epsilon(2e-3));
    }
    CHECK(steady_amplitude(1.0, 5.0, 100.0, 4) == doctest::Approx(butter_mag(1.0, 5.0, 100.0, 4)).epsilon(2e-3));
  }

  TEST_CASE("impulse response sums to the DC gain") {
    // A leading zero primes the state at rest.
    std::vector<double> x(1001, 0.0);
    x[1] = 1.0;
    const auto y = lowpass_causal(x, 5.0, 100.0, 2);
    double s = 0.0;
    for (double v : y) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("the filter is linear and time-invariant") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(500), y(500), sum(500), ax(500);
    for (std::size_t i = 0; i < 500; ++i) {
      x[i] = n(rng);
      y[i] = n(rng);
      sum[i] = x[i] + y[i];
      ax[i] = 3.5 * x[i];
    }
    const auto fx = lowpass_causal(x, 5.0, 100.0, 2);
    const auto fy = lowpass_causal(y, 5.0, 100.0, 2);
    const auto fs = lowpass_causal(sum, 5.0, 100.0, 2);
    const auto fa = lowpass_causal(ax, 5.0, 100.0, 2);
    for (std::size_t i = 0; i < 500; ++i) {
      CHECK(fs[i] == doctest::Approx(fx[i] + fy[i]).epsilon(1e-9).scale(1.0));
      CHECK(fa[i] == doctest::Approx(3.5 * fx[i]).epsilon(1e-9).scale(1.0));
    }
    // Shift: prepend zeros, the response shifts with it.
    std::vector<double> shifted(10, 0.0);
    shifted.insert(shifted.end(), x.begin(), x.end());
    std::vector<double> z(1, 0.0);
    z.insert(z.end(), x.begin(), x.end());
    const auto f1 = lowpass_causal(z, 5.0, 100.0, 2);
    const auto f2 = lowpass_causal(shifted, 5.0, 100.0, 2);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f2[i + 10] == doctest::Approx(f1[i + 1]).epsilon(1e-12));
  }

  TEST_CASE("invalid filter settings") {
    CHECK_THROWS_AS(LowpassFilter(60.0, 100.0, 2), Error);
    CHECK_THROWS_AS(LowpassFilter(5.0, 100.0, 3), Error);
    CHECK_THROWS_AS(LowpassFilter(-1.0, 100.0, 2), Error);
  }

  TEST_CASE("percentile by hand") {
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(i);
    CHECK(percentile(v, 95.0) == doctest::Approx(95.0).epsilon(1e-12));
    CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 50.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(percentile({10.0, 0.0}, 95.0) == doctest::Approx(9.5).epsilon(1e-12));
  }

  TEST_CASE("MVC reference: constant, zero channel floor") {
    auto s = fixture::constant_sequence(400, 100.0, 7.0, Gesture::WF);
    for (auto& f : s.emg) f.values[3] = 0.0;
    const auto ref = mvc_reference(s, PreprocessConfig{});
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (c == 3) CHECK(ref.scale[c] == kMvcFloor);
      else CHECK(ref.scale[c] == doctest::Approx(7.0).epsilon(1e-12));
    }
    auto shortseq = fixture::constant_sequence(50, 100.0, 1.0, Gesture::WF);
    CHECK_THROWS_AS(mvc_reference(shortseq, PreprocessConfig{}), Error);
  }

  TEST_CASE("normalize") {
    CHECK(normalize(std::vector<double>(4, 2.5), 2.5, 2.0) == std::vector<double>(4, 1.0));
    CHECK(normalize(std::vector<double>{7.5}, 2.5, 2.0)[0] == 2.0);
    CHECK(normalize(std::vector<double>{0.0}, 2.5, 2.0)[0] == 0.0);
  }

  TEST_CASE("zero EMG gives zero envelopes, and the result is deterministic") {
    auto s = fixture::constant_sequence(300, 100.0, 0.0, Gesture::Rest);
    const auto p = preprocess_sequence(s, PreprocessConfig{});
    for (const auto& ch : p.envelope) {
      for (double v : ch) CHECK(v == 0.0);
    }
    const auto spec = fixture::small_spec(1, 1);
    const auto seq = downsample_emg(generate_sequence(spec, 1, Hand::Right, Gesture::WE), 2);
    const auto a = preprocess_sequence(seq, PreprocessConfig{});
    const auto b = preprocess_sequence(seq, PreprocessConfig{});
    CHECK(a.envelope == b.envelope);
    CHECK(a.force == b.force);
  }

  TEST_CASE("envelopes stay within [0, clip_max]") {
    const auto spec = fixture::small_spec(1, 1);
    for (auto g : kTaskGestures) {
      const auto p = preprocess_sequence(downsample_emg(generate_sequence(spec, 1, Hand::Left, g), 2),
                                         PreprocessConfig{});
      for (const auto& ch : p.envelope) {
        for (double v : ch) {
          CHECK(v >= 0.0);
          CHECK(v <= 2.0);
        }
      }
    }
  }

  TEST_CASE("MVC trapezoid plateaus near 1 on its lead channel") {
    const auto spec = fixture::small_spec(1, 1);
    const auto raw = generate_sequence(spec, 1, Hand::Right, Gesture::WF);
    const auto p = preprocess_sequence(downsample_emg(raw, 2), PreprocessConfig{});
    REQUIRE(raw.labels.size() == 1);
    // Hold phase, skipping the filter's settling time after the ramp.
    const double t0 = raw.labels[0].t_start + spec.ramp_s + 0.5;
    const double t1 = raw.labels[0].t_end - spec.ramp_s;
    std::vector<double> hold;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p.t[i] >= t0 && p.t[i] <= t1) hold.push_back(p.envelope[ChannelId(5).index()][i]);
    }
    REQUIRE(hold.size() > 300);
    CHECK(median(hold) == doctest::Approx(1.0).epsilon(0.1));
    const double m = mean(hold);
    double ss = 0.0;
    for (double v : hold) ss += (v - m) * (v - m);
    CHECK(std::sqrt(ss / hold.size()) <= 0.1);
  }

  TEST_CASE("rectify must precede the filter") {
    std::vector<double> x(200);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const auto a = lowpass_causal(rectify(x), 5.0, 100.0, 2);
    const auto b = rectify(lowpass_causal(x, 5.0, 100.0, 2));
    CHECK(a.back() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(b.back() < 0.1);
  }

  TEST_CASE("working rate factor") {
    PreprocessConfig cfg;
    CHECK(working_rate_factor(200.0, cfg) == 2);
    CHECK(working_rate_factor(100.0, cfg) == 1);
    CHECK_THROWS_AS(working_rate_factor(150.0, cfg), Error);
  }
}
