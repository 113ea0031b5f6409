#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"

#include "dnp/network.hpp"

namespace dnpgcn {

inline constexpr int kCheckpointVersion = 1;

nlohmann::json config_to_json(const ModelConfig& cfg);
/// Throws ParseError on missing or mistyped fields, ConfigError on invalid values.
ModelConfig config_from_json(const nlohmann::json& j);

/// `{"version":1,"config":{...},"tensors":{name:{"shape":[r,c],"data":[...]}}}`,
/// data row-major. Running batch-norm statistics are stored alongside the
/// trainable tensors.
std::string save_checkpoint(const ModelParams& p, const ModelConfig& cfg);
/// Throws ParseError on a corrupt payload or version mismatch.
std::pair<ModelParams, ModelConfig> load_checkpoint(std::string_view bytes);

}  // namespace dnpgcn
