#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emg {

inline constexpr std::size_t kChannelCount = 8;
inline constexpr std::size_t kGestureCount = 6;

/// Gesture classes. The numeric order is also the tie-break order used by
/// the KNN vote, so do not reorder.
enum class Gesture : std::uint8_t { Rest = 0, WF, WE, WRD, WUD, HC };

inline constexpr std::array<Gesture, kGestureCount> kAllGestures = {
    Gesture::Rest, Gesture::WF, Gesture::WE, Gesture::WRD, Gesture::WUD, Gesture::HC};

/// The five scripted contraction tasks (everything except Rest).
inline constexpr std::array<Gesture, 5> kTaskGestures = {
    Gesture::WF, Gesture::WE, Gesture::WRD, Gesture::WUD, Gesture::HC};

constexpr std::size_t index_of(Gesture g) { return static_cast<std::size_t>(g); }

/// Wire names: REST, WF, WE, WRD, WUD, HC.
std::string_view gesture_name(Gesture g);
std::optional<Gesture> parse_gesture(std::string_view name);

enum class Hand : std::uint8_t { Left, Right };

std::string_view hand_name(Hand h);
std::optional<Hand> parse_hand(std::string_view name);

/// Recording protocol of a sequence: a single trapezoidal MVC effort or the
/// graded hand-close staircase.
enum class Protocol : std::uint8_t { Mvc, Step };

std::string_view protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

/// One-based armband channel number, 1..8.
class ChannelId {
 public:
  explicit ChannelId(int id);

  int value() const { return id_; }
  std::size_t index() const { return static_cast<std::size_t>(id_ - 1); }

  friend auto operator<=>(const ChannelId&, const ChannelId&) = default;

 private:
  int id_;
};

std::vector<ChannelId> all_channels();

/// Parses "2,5,8" style lists.
std::vector<ChannelId> parse_channel_list(std::string_view text);
std::string format_channel_list(std::span<const ChannelId> channels);

/// Channel number -> muscle name, indexed by ChannelId::index().
using ChannelMap = std::array<std::string, kChannelCount>;

/// Armband placement with the LED over channel 4.
ChannelMap default_channel_map();

struct EmgFrame {
  double t = 0.0;
  std::array<double, kChannelCount> values{};
};

struct ForceSample {
  double t = 0.0;
  double force = 0.0;  // newtons
};

/// Half-open interval [t_start, t_end).
struct LabelInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  Gesture label = Gesture::Rest;
};

struct Sequence {
  std::string id;
  std::string subject_id;
  Hand hand = Hand::Right;
  Gesture task = Gesture::Rest;
  Protocol protocol = Protocol::Mvc;
  double sample_rate_hz = 0.0;
  std::vector<EmgFrame> emg;
  std::vector<ForceSample> force;
  std::vector<LabelInterval> labels;

  /// Throws Error naming the sequence when an invariant does not hold.
  void validate() const;

  /// Label at every EMG timestamp; uncovered timestamps are Rest.
  std::vector<Gesture> frame_labels() const;
};

struct Dataset {
  std::string schema_version = "1";
  ChannelMap channel_map = default_channel_map();
  std::vector<Sequence> sequences;

  void validate() const;
};

}  // namespace emg
