#include "dnp/checkpoint.hpp"

#include <cmath>

namespace dnpgcn {

using nlohmann::json;

json config_to_json(const ModelConfig& cfg) {
  return {{"width", cfg.width},
          {"depth", cfg.depth},
          {"node_features", cfg.node_features},
          {"edge_features", cfg.edge_features},
          {"classes", cfg.classes},
          {"norm", std::string(to_string(cfg.norm))},
          {"edge_in_node_update", cfg.edge_in_node_update},
          {"edge_update", cfg.edge_update},
          {"edge_in_readout", cfg.edge_in_readout}};
}

ModelConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("checkpoint config must be an object");
  auto integer = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw ParseError(std::string("config field \"") + key + "\" must be an integer");
    return j[key].get<int>();
  };
  auto flag = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_boolean()) throw ParseError(std::string("config field \"") + key + "\" must be a boolean");
    return j[key].get<bool>();
  };
  ModelConfig cfg;
  cfg.width = integer("width");
  cfg.depth = integer("depth");
  cfg.node_features = integer("node_features");
  cfg.edge_features = integer("edge_features");
  cfg.classes = integer("classes");
  if (!j.contains("norm") || !j["norm"].is_string()) throw ParseError("config field \"norm\" must be a string");
  cfg.norm = parse_norm_mode(j["norm"].get<std::string>());
  cfg.edge_in_node_update = flag("edge_in_node_update");
  cfg.edge_update = flag("edge_update");
  cfg.edge_in_readout = flag("edge_in_readout");
  cfg.validate();
  return cfg;
}

namespace {

json tensor_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

void fill_tensor(const std::string& name, const json& t, Matrix& m) {
  if (!t.is_object() || !t.contains("shape") || !t.contains("data") || !t["shape"].is_array() ||
      !t["data"].is_array())
    throw ParseError("checkpoint tensor " + name + " is malformed");
  const auto& shape = t["shape"];
  if (shape.size() != 2 || !shape[0].is_number_integer() || !shape[1].is_number_integer() ||
      shape[0].get<long>() != m.rows() || shape[1].get<long>() != m.cols())
    throw ParseError("checkpoint tensor " + name + " has shape " + shape.dump() + ", expected [" +
                     std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "]");
  const auto& data = t["data"];
  if (static_cast<Eigen::Index>(data.size()) != m.size())
    throw ParseError("checkpoint tensor " + name + " has " + std::to_string(data.size()) + " values, expected " +
                     std::to_string(m.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto& v = data[k++];
      if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw ParseError("checkpoint tensor " + name + " holds a non-finite or non-numeric value");
      m(r, c) = v.get<double>();
    }
}

}  // namespace

std::string save_checkpoint(const ModelParams& p, const ModelConfig& cfg) {
  ModelParams copy = p;
  json tensors = json::object();
  for (const auto& [name, m] : parameter_refs(copy, cfg)) tensors[name] = tensor_json(*m);
  for (const auto& [name, m] : buffer_refs(copy, cfg)) tensors[name] = tensor_json(*m);
  return json{{"version", kCheckpointVersion}, {"config", config_to_json(cfg)}, {"tensors", std::move(tensors)}}.dump() +
         "\n";
}

std::pair<ModelParams, ModelConfig> load_checkpoint(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer())
    throw ParseError("checkpoint has no version");
  if (doc["version"].get<int>() != kCheckpointVersion)
    throw ParseError("unsupported checkpoint version " + doc["version"].dump() + " (expected " +
                     std::to_string(kCheckpointVersion) + ")");
  if (!doc.contains("config") || !doc.contains("tensors") || !doc["tensors"].is_object())
    throw ParseError("checkpoint lacks config or tensors");
  const ModelConfig cfg = config_from_json(doc["config"]);
  ModelParams p = zeros_like(cfg);
  const auto& tensors = doc["tensors"];
  std::size_t expected = 0;
  auto load = [&](const auto& refs) {
    for (const auto& [name, m] : refs) {
      if (!tensors.contains(name)) throw ParseError("checkpoint is missing tensor " + name);
      fill_tensor(name, tensors[name], *m);
      ++expected;
    }
  };
  load(parameter_refs(p, cfg));
  load(buffer_refs(p, cfg));
  if (tensors.size() != expected) throw ParseError("checkpoint has tensors the configuration does not use");
  return {std::move(p), cfg};
}

}  // namespace dnpgcn
