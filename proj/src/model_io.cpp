#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emg/error.hpp"
#include "emg/pipeline.hpp"

namespace emg {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw Error("invalid model bundle: matrix data length does not match its shape");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

}  // namespace

std::string model_to_json(const PipelineModel& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["preprocess"] = {{"lowpass_cutoff_hz", m.preprocess.lowpass_cutoff_hz},
                     {"filter_order", m.preprocess.filter_order},
                     {"mvc_percentile", m.preprocess.mvc_percentile},
                     {"clip_max", m.preprocess.clip_max},
                     {"working_rate_hz", m.preprocess.working_rate_hz}};
  j["downsample_factor"] = m.downsample_factor;
  j["working_rate_hz"] = m.working_rate_hz;
  j["mvc_scale"] = std::vector<double>(m.mvc.scale.begin(), m.mvc.scale.end());

  std::vector<int> channels;
  for (const auto& c : m.features.channels) channels.push_back(c.value());
  j["features"] = {{"window_len", m.features.window_len},
                   {"stride", m.features.stride},
                   {"ar_order", m.features.ar_order},
                   {"include_spatial", m.features.include_spatial},
                   {"channels", channels},
                   {"names", m.features.feature_names()}};
  j["scaler"] = {{"mean", m.scaler.mean}, {"std", m.scaler.std}};
  j["pca"] = {{"mean", m.pca.mean},
              {"components", matrix_json(m.pca.components)},
              {"explained_ratio", m.pca.explained_ratio},
              {"retained", m.pca.retained}};

  std::vector<std::string> labels;
  labels.reserve(m.knn.labels.size());
  for (auto g : m.knn.labels) labels.emplace_back(gesture_name(g));
  j["knn"] = {{"k", m.knn.k}, {"points", matrix_json(m.knn.points)}, {"labels", labels}};

  json nodes = json::array();
  for (const auto& n : m.tree.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.count});
  j["tree"] = {{"dims", m.tree.dims}, {"nodes", nodes}};
  j["force_norm"] = {{"offset", m.force_norm.offset}, {"scale", m.force_norm.scale}};
  j["models"] = {{"knn_k", m.models.knn_k},
                 {"min_leaf", m.models.min_leaf},
                 {"output_cutoff_hz", m.models.output_cutoff_hz},
                 {"output_filter_order", m.models.output_filter_order}};
  return j.dump();
}

PipelineModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("model bundle is not valid JSON: ") + e.what());
  }
  PipelineModel m;
  try {
    m.schema_version = j.at("schema_version").get<std::string>();
    if (m.schema_version != "1") {
      throw Error("model bundle schema_version mismatch: expected \"1\", got \"" + m.schema_version + "\"");
    }
    const auto& p = j.at("preprocess");
    m.preprocess.lowpass_cutoff_hz = p.at("lowpass_cutoff_hz").get<double>();
    m.preprocess.filter_order = p.at("filter_order").get<int>();
    m.preprocess.mvc_percentile = p.at("mvc_percentile").get<double>();
    m.preprocess.clip_max = p.at("clip_max").get<double>();
    m.preprocess.working_rate_hz = p.at("working_rate_hz").get<double>();
    m.downsample_factor = j.at("downsample_factor").get<int>();
    m.working_rate_hz = j.at("working_rate_hz").get<double>();
    const auto mvc = j.at("mvc_scale").get<std::vector<double>>();
    if (mvc.size() != kChannelCount) throw Error("invalid model bundle: mvc_scale must have 8 entries");
    std::copy(mvc.begin(), mvc.end(), m.mvc.scale.begin());

    const auto& f = j.at("features");
    m.features.window_len = f.at("window_len").get<int>();
    m.features.stride = f.at("stride").get<int>();
    m.features.ar_order = f.at("ar_order").get<int>();
    m.features.include_spatial = f.at("include_spatial").get<bool>();
    m.features.channels.clear();
    for (int c : f.at("channels").get<std::vector<int>>()) m.features.channels.emplace_back(c);
    if (f.at("names").get<std::vector<std::string>>() != m.features.feature_names()) {
      throw Error("invalid model bundle: feature names do not match the feature configuration");
    }

    m.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    m.scaler.std = j.at("scaler").at("std").get<std::vector<double>>();
    const auto& pc = j.at("pca");
    m.pca.mean = pc.at("mean").get<std::vector<double>>();
    m.pca.components = matrix_from(pc.at("components"));
    m.pca.explained_ratio = pc.at("explained_ratio").get<std::vector<double>>();
    m.pca.retained = pc.at("retained").get<std::size_t>();

    const auto& k = j.at("knn");
    m.knn.k = k.at("k").get<int>();
    m.knn.points = matrix_from(k.at("points"));
    for (const auto& name : k.at("labels").get<std::vector<std::string>>()) {
      const auto g = parse_gesture(name);
      if (!g) throw Error("invalid model bundle: unknown KNN label '" + name + "'");
      m.knn.labels.push_back(*g);
    }

    const auto& t = j.at("tree");
    m.tree.dims = t.at("dims").get<std::size_t>();
    for (const auto& n : t.at("nodes")) {
      if (!n.is_array() || n.size() != 6) throw Error("invalid model bundle: malformed tree node");
      TreeNode node;
      node.feature = n[0].get<int>();
      node.threshold = n[1].get<double>();
      node.left = n[2].get<int>();
      node.right = n[3].get<int>();
      node.value = n[4].get<double>();
      node.count = n[5].get<std::size_t>();
      m.tree.nodes.push_back(node);
    }
    m.force_norm.offset = j.at("force_norm").at("offset").get<double>();
    m.force_norm.scale = j.at("force_norm").at("scale").get<double>();
    const auto& mo = j.at("models");
    m.models.knn_k = mo.at("knn_k").get<int>();
    m.models.min_leaf = mo.at("min_leaf").get<int>();
    m.models.output_cutoff_hz = mo.at("output_cutoff_hz").get<double>();
    m.models.output_filter_order = mo.at("output_filter_order").get<int>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid model bundle: ") + e.what());
  }
  m.validate(true);
  return m;
}

void save_model(const PipelineModel& m, const std::filesystem::path& path) {
  m.validate(true);
  const std::string text = model_to_json(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  out << text << '\n';
  if (!out) throw Error("write failed for model '" + path.string() + "'");
}

PipelineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace emg
