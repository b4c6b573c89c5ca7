#include "emg/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emg/error.hpp"

namespace emg {

namespace {

constexpr std::array<std::string_view, kGestureCount> kGestureNames = {
    "REST", "WF", "WE", "WRD", "WUD", "HC"};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view gesture_name(Gesture g) { return kGestureNames[index_of(g)]; }

std::optional<Gesture> parse_gesture(std::string_view name) {
  for (std::size_t i = 0; i < kGestureNames.size(); ++i) {
    if (kGestureNames[i] == name) return static_cast<Gesture>(i);
  }
  return std::nullopt;
}

std::string_view hand_name(Hand h) { return h == Hand::Left ? "left" : "right"; }

std::optional<Hand> parse_hand(std::string_view name) {
  if (name == "left") return Hand::Left;
  if (name == "right") return Hand::Right;
  return std::nullopt;
}

std::string_view protocol_name(Protocol p) { return p == Protocol::Mvc ? "mvc" : "step"; }

std::optional<Protocol> parse_protocol(std::string_view name) {
  if (name == "mvc") return Protocol::Mvc;
  if (name == "step") return Protocol::Step;
  return std::nullopt;
}

ChannelId::ChannelId(int id) : id_(id) {
  if (id < 1 || id > static_cast<int>(kChannelCount)) {
    throw Error("channel id out of range 1..8: " + std::to_string(id));
  }
}

std::vector<ChannelId> all_channels() {
  std::vector<ChannelId> out;
  for (int c = 1; c <= static_cast<int>(kChannelCount); ++c) out.emplace_back(c);
  return out;
}

std::vector<ChannelId> parse_channel_list(std::string_view text) {
  std::vector<ChannelId> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string item = trim(text.substr(pos, comma - pos));
    if (item.empty()) throw ConfigError("empty entry in channel list '" + std::string(text) + "'");
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("bad channel id '" + item + "'");
    if (id < 1 || id > static_cast<int>(kChannelCount)) {
      throw ConfigError("channel id out of range 1..8: " + item);
    }
    ChannelId ch(id);
    if (std::find(out.begin(), out.end(), ch) != out.end()) {
      throw ConfigError("duplicate channel " + item);
    }
    out.push_back(ch);
    pos = comma + 1;
  }
  return out;
}

std::string format_channel_list(std::span<const ChannelId> channels) {
  std::string out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(channels[i].value());
  }
  return out;
}

ChannelMap default_channel_map() {
  return {"Extensor Carpi Ulnaris",
          "Extensor Digitorum",
          "Extensor Carpi Radialis Longus e Brevis",
          "Brachioradialis",
          "Flexor Carpi Radialis",
          "Palmaris Longus",
          "Flexor Digitorum Superficialis",
          "Flexor Carpi Ulnaris"};
}

void Sequence::validate() const {
  const std::string where = "sequence '" + id + "': ";
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw Error(where + "sample_rate_hz must be positive");
  }
  for (std::size_t i = 0; i < emg.size(); ++i) {
    if (!std::isfinite(emg[i].t)) throw Error(where + "non-finite EMG timestamp at frame " + std::to_string(i));
    if (i > 0 && !(emg[i].t > emg[i - 1].t)) {
      throw Error(where + "non-monotone EMG timestamps at frame " + std::to_string(i));
    }
    for (double v : emg[i].values) {
      if (!std::isfinite(v)) throw Error(where + "non-finite EMG value at frame " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < force.size(); ++i) {
    if (!std::isfinite(force[i].t) || !std::isfinite(force[i].force)) {
      throw Error(where + "non-finite force sample " + std::to_string(i));
    }
    if (force[i].force < 0.0) throw Error(where + "negative force at sample " + std::to_string(i));
    if (i > 0 && !(force[i].t > force[i - 1].t)) {
      throw Error(where + "non-monotone force timestamps at sample " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!(labels[i].t_start < labels[i].t_end)) {
      throw Error(where + "label interval " + std::to_string(i) + " has t_start >= t_end");
    }
    if (i > 0 && labels[i].t_start < labels[i - 1].t_end) {
      throw Error(where + "label intervals overlap or are unsorted at " + std::to_string(i));
    }
  }
}

std::vector<Gesture> Sequence::frame_labels() const {
  std::vector<Gesture> out(emg.size(), Gesture::Rest);
  std::size_t j = 0;
  for (std::size_t i = 0; i < emg.size(); ++i) {
    const double t = emg[i].t;
    while (j < labels.size() && labels[j].t_end <= t) ++j;
    if (j < labels.size() && labels[j].t_start <= t) out[i] = labels[j].label;
  }
  return out;
}

void Dataset::validate() const {
  if (schema_version != "1") throw Error("unsupported dataset schema version '" + schema_version + "'");
  if (sequences.empty()) throw Error("dataset has no sequences");
  for (const auto& s : sequences) s.validate();
}

}  // namespace emg
