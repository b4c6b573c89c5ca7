#include "emg/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "emg/error.hpp"

namespace emg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
const std::string kEmgHeader = "t_s,ch1,ch2,ch3,ch4,ch5,ch6,ch7,ch8";
const std::string kForceHeader = "t_s,force_n";
const std::string kLabelsHeader = "t_start_s,t_end_s,label";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto c = line.find(',', pos);
    if (c == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

double parse_real(std::string_view field, const std::string& where, std::size_t line) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(where + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

// Reads non-empty lines; the first must equal `header`. Calls row(fields, line_no).
template <class Row>
void read_csv(std::istream& in, const std::string& where, std::string_view header, Row&& row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        const auto got = split_commas(line).size();
        const auto want = split_commas(header).size();
        if (header == kEmgHeader && got != want) {
          throw Error(where + ":" + std::to_string(line_no) + ": wrong channel count (expected 8, got " +
                      std::to_string(got == 0 ? 0 : got - 1) + ")");
        }
        throw Error(where + ":" + std::to_string(line_no) + ": expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    row(split_commas(line), line_no);
  }
  if (!seen_header) throw Error(where + ": missing CSV header");
}

std::ifstream open_in(const fs::path& p, const std::string& what) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + what + " '" + p.string() + "'");
  return in;
}


template <class T>
T field_or_throw(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string format_real9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<EmgFrame> read_emg_csv(std::istream& in, const std::string& label) {
  std::vector<EmgFrame> frames;
  read_csv(in, label, kEmgHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() != kChannelCount + 1) {
      throw Error(label + ":" + std::to_string(line) + ": wrong channel count (expected 8, got " +
                  std::to_string(f.size() == 0 ? 0 : f.size() - 1) + ")");
    }
    EmgFrame fr;
    fr.t = parse_real(f[0], label, line);
    for (std::size_t c = 0; c < kChannelCount; ++c) fr.values[c] = parse_real(f[c + 1], label, line);
    if (!frames.empty() && !(fr.t > frames.back().t)) {
      throw Error(label + ":" + std::to_string(line) + ": non-monotone timestamp");
    }
    frames.push_back(fr);
  });
  return frames;
}

Dataset load_dataset(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) throw Error("manifest not found: '" + manifest_path.string() + "'");
  json m;
  {
    auto in = open_in(manifest_path, "manifest");
    try {
      in >> m;
    } catch (const json::exception& e) {
      throw Error("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
    }
  }
  const fs::path base = manifest_path.parent_path();
  Dataset d;
  d.schema_version = field_or_throw<std::string>(m, "schema_version", "manifest");
  if (d.schema_version != "1") {
    throw Error("manifest schema_version mismatch: expected \"1\", got \"" + d.schema_version + "\"");
  }
  if (m.contains("channel_map")) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const auto key = std::to_string(c + 1);
      if (!m["channel_map"].contains(key)) throw Error("manifest channel_map lacks channel " + key);
      d.channel_map[c] = m["channel_map"][key].get<std::string>();
    }
  }
  if (!m.contains("sequences") || !m["sequences"].is_array()) throw Error("manifest has no sequences array");

  for (const auto& js : m["sequences"]) {
    Sequence s;
    s.id = field_or_throw<std::string>(js, "id", "manifest sequence");
    const std::string where = "sequence '" + s.id + "'";
    s.subject_id = field_or_throw<std::string>(js, "subject", where);
    const auto hand = parse_hand(field_or_throw<std::string>(js, "hand", where));
    if (!hand) throw Error(where + ": hand must be 'left' or 'right'");
    s.hand = *hand;
    const auto task = parse_gesture(field_or_throw<std::string>(js, "task", where));
    if (!task) throw Error(where + ": unknown task label");
    s.task = *task;
    s.protocol = Protocol::Mvc;
    if (js.contains("protocol")) {
      const auto p = parse_protocol(js["protocol"].get<std::string>());
      if (!p) throw Error(where + ": protocol must be 'mvc' or 'step'");
      s.protocol = *p;
    }
    s.sample_rate_hz = field_or_throw<double>(js, "sample_rate_hz", where);

    const auto emg_path = base / field_or_throw<std::string>(js, "emg_csv", where);
    const auto force_path = base / field_or_throw<std::string>(js, "force_csv", where);
    const auto labels_path = base / field_or_throw<std::string>(js, "labels_csv", where);

    {
      auto in = open_in(emg_path, where + " emg csv");
      s.emg = read_emg_csv(in, where + " " + emg_path.filename().string());
    }
    {
      auto in = open_in(force_path, where + " force csv");
      const std::string lbl = where + " " + force_path.filename().string();
      read_csv(in, lbl, kForceHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != 2) throw Error(lbl + ":" + std::to_string(line) + ": expected 2 columns");
        ForceSample fsmp{parse_real(f[0], lbl, line), parse_real(f[1], lbl, line)};
        if (!s.force.empty() && !(fsmp.t > s.force.back().t)) {
          throw Error(lbl + ":" + std::to_string(line) + ": non-monotone timestamp");
        }
        s.force.push_back(fsmp);
      });
    }
    {
      auto in = open_in(labels_path, where + " labels csv");
      const std::string lbl = where + " " + labels_path.filename().string();
      read_csv(in, lbl, kLabelsHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != 3) throw Error(lbl + ":" + std::to_string(line) + ": expected 3 columns");
        const auto g = parse_gesture(f[2]);
        if (!g) throw Error(lbl + ":" + std::to_string(line) + ": unknown label '" + std::string(f[2]) + "'");
        s.labels.push_back({parse_real(f[0], lbl, line), parse_real(f[1], lbl, line), *g});
      });
    }
    s.validate();
    d.sequences.push_back(std::move(s));
  }
  d.validate();
  return d;
}

fs::path save_dataset(const Dataset& d, const fs::path& dir) {
  d.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());

  json m;
  m["schema_version"] = d.schema_version;
  json cmap = json::object();
  for (std::size_t c = 0; c < kChannelCount; ++c) cmap[std::to_string(c + 1)] = d.channel_map[c];
  m["channel_map"] = cmap;
  m["sequences"] = json::array();

  auto open_out = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
  };

  for (const auto& s : d.sequences) {
    const std::string emg_name = s.id + "_emg.csv";
    const std::string force_name = s.id + "_force.csv";
    const std::string labels_name = s.id + "_labels.csv";
    {
      auto out = open_out(dir / emg_name);
      out << kEmgHeader << '\n';
      std::string row;
      for (const auto& fr : s.emg) {
        row = format_real9(fr.t);
        for (double v : fr.values) {
          row += ',';
          row += format_real9(v);
        }
        out << row << '\n';
      }
      if (!out) throw Error("write failed for '" + (dir / emg_name).string() + "'");
    }
    {
      auto out = open_out(dir / force_name);
      out << kForceHeader << '\n';
      for (const auto& f : s.force) out << format_real9(f.t) << ',' << format_real9(f.force) << '\n';
      if (!out) throw Error("write failed for '" + (dir / force_name).string() + "'");
    }
    {
      auto out = open_out(dir / labels_name);
      out << kLabelsHeader << '\n';
      for (const auto& l : s.labels) {
        out << format_real9(l.t_start) << ',' << format_real9(l.t_end) << ',' << gesture_name(l.label) << '\n';
      }
      if (!out) throw Error("write failed for '" + (dir / labels_name).string() + "'");
    }
    m["sequences"].push_back({{"id", s.id},
                              {"subject", s.subject_id},
                              {"hand", std::string(hand_name(s.hand))},
                              {"task", std::string(gesture_name(s.task))},
                              {"protocol", std::string(protocol_name(s.protocol))},
                              {"sample_rate_hz", s.sample_rate_hz},
                              {"emg_csv", emg_name},
                              {"force_csv", force_name},
                              {"labels_csv", labels_name}});
  }
  const fs::path manifest = dir / kManifestName;
  auto out = open_out(manifest);
  out << m.dump(2) << '\n';
  if (!out) throw Error("write failed for '" + manifest.string() + "'");
  return manifest;
}

}  // namespace emg
