#include "doctest.h"

#include "dnp/checkpoint.hpp"

using namespace dnpgcn;

namespace {

ModelConfig config(NormMode norm, bool a, bool b, bool c) {
  ModelConfig cfg;
  cfg.width = 5;
  cfg.depth = 2;
  cfg.node_features = 7;
  cfg.classes = 3;
  cfg.norm = norm;
  cfg.edge_in_node_update = a;
  cfg.edge_update = b;
  cfg.edge_in_readout = c;
  return cfg;
}

}  // namespace

TEST_CASE("save and load round-trip bitwise") {
  for (int combo = 0; combo < 16; ++combo) {
    const auto cfg = config(combo & 8 ? NormMode::None : NormMode::Batch, combo & 1, combo & 2, combo & 4);
    auto p = init_params(cfg, 100 + combo);
    for (auto& [name, m] : buffer_refs(p, cfg)) m->setConstant(0.1 / 3.0);
    const std::string bytes = save_checkpoint(p, cfg);
    const auto [q, qcfg] = load_checkpoint(bytes);
    CHECK(qcfg == cfg);
    auto pr = parameter_refs(p, cfg);
    auto qr = parameter_refs(q, qcfg);
    REQUIRE(pr.size() == qr.size());
    for (std::size_t k = 0; k < pr.size(); ++k) CHECK(*pr[k].second == *qr[k].second);
    auto pb = buffer_refs(p, cfg);
    auto qb = buffer_refs(const_cast<ModelParams&>(q), qcfg);
    for (std::size_t k = 0; k < pb.size(); ++k) CHECK(*pb[k].second == *qb[k].second);
    CHECK(save_checkpoint(q, qcfg) == bytes);
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto cfg = config(NormMode::Batch, true, true, true);
  const std::string bytes = save_checkpoint(init_params(cfg, 1), cfg);
  for (std::size_t cut : {std::size_t(0), std::size_t(1), bytes.size() / 3, bytes.size() - 5})
    CHECK_THROWS_AS(load_checkpoint(bytes.substr(0, cut)), ParseError);

  auto doc = nlohmann::json::parse(bytes);
  auto versioned = doc;
  versioned["version"] = 2;
  CHECK_THROWS_WITH_AS(load_checkpoint(versioned.dump()), doctest::Contains("version"), ParseError);

  auto missing = doc;
  missing["tensors"].erase("classifier.fc2.b");
  CHECK_THROWS_AS(load_checkpoint(missing.dump()), ParseError);

  auto reshaped = doc;
  reshaped["tensors"]["node_in.W"]["shape"] = {7, 4};
  CHECK_THROWS_AS(load_checkpoint(reshaped.dump()), ParseError);

  auto nonfinite = doc;
  nonfinite["tensors"]["node_in.b"]["data"][0] = nullptr;
  CHECK_THROWS_AS(load_checkpoint(nonfinite.dump()), ParseError);

  auto extra = doc;
  extra["tensors"]["bogus"] = doc["tensors"]["node_in.b"];
  CHECK_THROWS_AS(load_checkpoint(extra.dump()), ParseError);

  auto bad_cfg = doc;
  bad_cfg["config"]["width"] = 0;
  CHECK_THROWS_AS(load_checkpoint(bad_cfg.dump()), ConfigError);
  bad_cfg["config"]["width"] = "five";
  CHECK_THROWS_AS(load_checkpoint(bad_cfg.dump()), ParseError);
}

TEST_CASE("config json carries every ablation flag") {
  const auto cfg = config(NormMode::None, false, true, false);
  const auto j = config_to_json(cfg);
  CHECK(j["edge_in_node_update"] == false);
  CHECK(j["edge_update"] == true);
  CHECK(j["edge_in_readout"] == false);
  CHECK(j["norm"] == "none");
  CHECK(config_from_json(j) == cfg);
}
