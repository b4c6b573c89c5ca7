#include "emg/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emg/error.hpp"

namespace emg {

Sequence downsample_emg(const Sequence& s, int factor) {
  if (factor < 1) throw Error("downsample factor must be >= 1, got " + std::to_string(factor));
  const auto f = static_cast<std::size_t>(factor);
  if (s.emg.size() < f) {
    throw Error("sequence '" + s.id + "' has fewer frames than the downsample factor");
  }
  Sequence out = s;
  out.sample_rate_hz = s.sample_rate_hz / factor;
  if (factor == 1) return out;

  const std::size_t blocks = s.emg.size() / f;
  out.emg.assign(blocks, EmgFrame{});
  for (std::size_t b = 0; b < blocks; ++b) {
    EmgFrame acc{};
    for (std::size_t j = 0; j < f; ++j) {
      const auto& fr = s.emg[b * f + j];
      acc.t += fr.t;
      for (std::size_t c = 0; c < kChannelCount; ++c) acc.values[c] += fr.values[c];
    }
    acc.t /= factor;
    for (auto& v : acc.values) v /= factor;
    out.emg[b] = acc;
  }
  return out;
}

std::vector<double> align_force(const Sequence& s) {
  if (s.force.empty()) throw Error("sequence '" + s.id + "' has no force samples");
  const auto& fs = s.force;
  std::vector<double> out(s.emg.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < s.emg.size(); ++i) {
    const double t = s.emg[i].t;
    if (t <= fs.front().t) {
      out[i] = fs.front().force;
      continue;
    }
    if (t >= fs.back().t) {
      out[i] = fs.back().force;
      continue;
    }
    // EMG timestamps are increasing, so the bracketing segment only moves forward.
    while (j + 1 < fs.size() && fs[j + 1].t < t) ++j;
    while (j > 0 && fs[j].t > t) --j;
    const auto& a = fs[j];
    const auto& b = fs[j + 1];
    if (t == b.t) {
      out[i] = b.force;
    } else {
      out[i] = std::lerp(a.force, b.force, (t - a.t) / (b.t - a.t));
    }
  }
  return out;
}

}  // namespace emg
