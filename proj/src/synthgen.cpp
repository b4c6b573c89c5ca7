#include "emg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "emg/error.hpp"

namespace emg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, int subject, Hand hand, std::uint64_t stream) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(subject));
  s = splitmix64(s ^ static_cast<std::uint64_t>(hand));
  return splitmix64(s ^ stream);
}

constexpr std::uint64_t kSubjectStream = 0xA5A5;
constexpr std::uint64_t kStepStream = 0x57E9;

struct SubjectTraits {
  std::array<double, kChannelCount> gain{};
  double strength = 1.0;
};

SubjectTraits subject_traits(const SynthSpec& spec, int subject, Hand hand) {
  std::mt19937_64 rng(derive_seed(spec.seed, subject, hand, kSubjectStream));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SubjectTraits t;
  for (auto& g : t.gain) g = 1.0 + spec.gain_spread * u(rng);
  t.strength = 1.0 + spec.strength_spread * u(rng);
  return t;
}

std::array<double, kChannelCount> mixed_activation(const SynthSpec& spec, Gesture task) {
  const auto& row = spec.activation[index_of(task)];
  std::array<double, kChannelCount> out{};
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const double prev = row[(c + kChannelCount - 1) % kChannelCount];
    const double next = row[(c + 1) % kChannelCount];
    out[c] = (1.0 - spec.crosstalk) * row[c] + spec.crosstalk * 0.5 * (prev + next);
  }
  return out;
}

std::string sequence_id(int subject, Hand hand, std::string_view what) {
  return "S" + std::to_string(subject) + "_" + (hand == Hand::Left ? "L" : "R") + "_" + std::string(what);
}

// Fills EMG frames and force samples given an effort profile in [0, ~1]
// (fraction of this subject's maximal effort for `task`) and a force profile.
template <class Effort, class Force>
void render(const SynthSpec& spec, const SubjectTraits& traits, Gesture task, double duration, std::mt19937_64& rng,
            Effort&& effort, Force&& force, Sequence& s) {
  const auto act = mixed_activation(spec, task);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase0(0.0, 2.0 * std::numbers::pi);

  std::array<double, kChannelCount> phase{};
  for (auto& p : phase) p = phase0(rng);

  const auto frames = static_cast<std::size_t>(std::floor(duration * spec.sample_rate_hz));
  s.emg.resize(frames);
  const double dphi = 2.0 * std::numbers::pi / spec.sample_rate_hz;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate_hz;
    const double e = effort(t);
    EmgFrame& fr = s.emg[i];
    fr.t = t;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      phase[c] += dphi * (spec.carrier_hz + spec.carrier_spread_hz * gauss(rng));
      const double amp = std::max(0.0, 1.0 + spec.carrier_jitter * gauss(rng));
      const double carrier = amp * std::sin(phase[c]);
      const double v = spec.mvc_amplitude * traits.gain[c] * act[c] * e * carrier + spec.noise_std * gauss(rng);
      fr.values[c] = std::clamp(v, -128.0, 127.0);
    }
  }
  const auto fsamples = static_cast<std::size_t>(std::floor(duration * spec.force_rate_hz));
  s.force.resize(fsamples);
  for (std::size_t j = 0; j < fsamples; ++j) {
    const double t = static_cast<double>(j) / spec.force_rate_hz;
    s.force[j] = {t, std::max(0.0, force(t) + spec.force_noise_n * gauss(rng))};
  }
}

}  // namespace

ActivationTemplate default_activation_template() {
  //        ch1   ch2   ch3   ch4   ch5   ch6   ch7   ch8
  return {{{0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00},    // Rest
           {0.05, 0.10, 0.05, 0.05, 0.90, 0.05, 0.05, 0.55},    // WF
           {0.05, 0.90, 0.05, 0.05, 0.10, 0.05, 0.05, 0.15},    // WE
           {0.05, 0.35, 0.05, 0.05, 0.80, 0.05, 0.05, 0.10},    // WRD
           {0.05, 0.30, 0.05, 0.05, 0.15, 0.05, 0.05, 0.90},    // WUD
           {0.05, 0.70, 0.05, 0.05, 0.65, 0.05, 0.05, 0.75}}};  // HC
}

void SynthSpec::validate() const {
  if (subjects < 1) throw ConfigError("synth.subjects must be >= 1");
  if (hands != 1 && hands != 2) throw ConfigError("synth.hands must be 1 or 2");
  if (!(sample_rate_hz > 0.0) || !(force_rate_hz > 0.0)) throw ConfigError("synth rates must be positive");
  if (rest_s <= 0.0 || ramp_s <= 0.0 || hold_s <= 0.0 || phase_jitter_s < 0.0) {
    throw ConfigError("synth phase durations must be positive");
  }
  if (step_levels < 1 || step_increment_n <= 0.0 || step_level_s <= 0.0 || step_ramp_s <= 0.0 ||
      step_ramp_s >= step_level_s || step_lead_s <= 0.0) {
    throw ConfigError("synth step-task definition is invalid");
  }
  if (crosstalk < 0.0 || crosstalk >= 1.0) throw ConfigError("synth.crosstalk must be in [0, 1)");
  if (noise_std < 0.0 || carrier_jitter < 0.0 || carrier_spread_hz < 0.0 || mvc_amplitude <= 0.0) {
    throw ConfigError("synth amplitudes must be non-negative");
  }
  if (gain_spread < 0.0 || gain_spread >= 1.0 || strength_spread < 0.0 || strength_spread >= 1.0) {
    throw ConfigError("synth spreads must be in [0, 1)");
  }
  if (max_force_n[index_of(Gesture::HC)] <= 0.0) throw ConfigError("hand-close max force must be positive");
  for (const auto& row : activation) {
    for (double a : row) {
      if (a < 0.0 || a > 1.0) throw ConfigError("activation template entries must be in [0, 1]");
    }
  }
}

Sequence generate_sequence(const SynthSpec& spec, int subject, Hand hand, Gesture task) {
  spec.validate();
  const auto traits = subject_traits(spec, subject, hand);
  std::mt19937_64 rng(derive_seed(spec.seed, subject, hand, index_of(task) + 1));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const double rest1 = spec.rest_s + spec.phase_jitter_s * u01(rng);
  const double hold = spec.hold_s + spec.phase_jitter_s * u01(rng);
  const double rest2 = spec.rest_s + spec.phase_jitter_s * u01(rng);
  const double tremor_phase = 2.0 * std::numbers::pi * u01(rng);
  const double up = rest1, top = up + spec.ramp_s, down = top + hold, end = down + spec.ramp_s;
  const double duration = end + rest2;

  auto effort = [&](double t) {
    if (t < up || t >= end) return 0.0;
    if (t < top) return (t - up) / spec.ramp_s;
    if (t >= down) return (end - t) / spec.ramp_s;
    return 1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * 0.4 * t + tremor_phase);
  };
  const double peak = spec.max_force_n[index_of(task)] * traits.strength;
  auto force = [&](double t) { return effort(t) * peak; };

  Sequence s;
  s.id = sequence_id(subject, hand, gesture_name(task));
  s.subject_id = "S" + std::to_string(subject);
  s.hand = hand;
  s.task = task;
  s.protocol = Protocol::Mvc;
  s.sample_rate_hz = spec.sample_rate_hz;
  render(spec, traits, task, duration, rng, effort, force, s);
  if (task != Gesture::Rest) s.labels.push_back({up, end, task});
  return s;
}

Sequence generate_step_task(const SynthSpec& spec, int subject, Hand hand) {
  spec.validate();
  const auto traits = subject_traits(spec, subject, hand);
  std::mt19937_64 rng(derive_seed(spec.seed, subject, hand, kStepStream));

  const double first = spec.step_lead_s;  // start of level 0
  const double last_end = first + (spec.step_levels + 1) * spec.step_level_s;
  const double release_end = last_end + spec.step_ramp_s;
  const double duration = release_end + spec.step_lead_s;

  auto target = [&](double t) {
    if (t < first + spec.step_level_s || t >= release_end) return 0.0;
    if (t >= last_end) return spec.step_levels * spec.step_increment_n * (release_end - t) / spec.step_ramp_s;
    const double rel = t - first;
    const int level = static_cast<int>(rel / spec.step_level_s);
    const double into = rel - level * spec.step_level_s;
    const double hi = level * spec.step_increment_n;
    if (into >= spec.step_ramp_s) return hi;
    const double lo = (level - 1) * spec.step_increment_n;
    return lo + (hi - lo) * into / spec.step_ramp_s;
  };
  const double capacity = spec.max_force_n[index_of(Gesture::HC)] * traits.strength;
  auto effort = [&](double t) { return target(t) / capacity; };

  Sequence s;
  s.id = sequence_id(subject, hand, "STEP");
  s.subject_id = "S" + std::to_string(subject);
  s.hand = hand;
  s.task = Gesture::HC;
  s.protocol = Protocol::Step;
  s.sample_rate_hz = spec.sample_rate_hz;
  render(spec, traits, Gesture::HC, duration, rng, effort, target, s);
  s.labels.push_back({first + spec.step_level_s, release_end, Gesture::HC});
  return s;
}

Dataset generate_dataset(const SynthSpec& spec) {
  spec.validate();
  Dataset d;
  for (int subject = 1; subject <= spec.subjects; ++subject) {
    std::vector<Hand> hands = spec.hands == 2 ? std::vector<Hand>{Hand::Left, Hand::Right} : std::vector<Hand>{Hand::Right};
    for (Hand h : hands) {
      for (Gesture g : kTaskGestures) d.sequences.push_back(generate_sequence(spec, subject, h, g));
      d.sequences.push_back(generate_step_task(spec, subject, h));
    }
  }
  d.validate();
  return d;
}

std::vector<Sequence> gesture_subset(const Dataset& d) {
  std::vector<Sequence> out;
  for (const auto& s : d.sequences) {
    if (s.protocol == Protocol::Mvc) out.push_back(s);
  }
  return out;
}

}  // namespace emg
