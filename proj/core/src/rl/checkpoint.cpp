#include "vnav/rl/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vnav::rl {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json layer_specs(const Model& model) {
  json specs = json::array();
  auto add = [&](const nn::Linear& l) { specs.push_back({l.out_dim(), l.in_dim()}); };
  add(model.ego_encoder);
  add(model.static_encoder);
  add(model.dynamic_encoder);
  if (model.kind == ModelKind::Iqn) add(model.quantile_encoder);
  add(model.head1);
  add(model.head2);
  add(model.head3);
  return specs;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model_kind"] = ckpt.model.kind == ModelKind::Iqn ? "iqn" : "dqn";
  j["layer_specs"] = layer_specs(ckpt.model);
  j["params"] = flatten_params(ckpt.model);
  j["training_step"] = ckpt.training_step;
  j["rng_seed"] = ckpt.rng_seed;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump() << "\n";
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_checkpoint: corrupt file " + path + ": " + e.what());
  }

  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::runtime_error("load_checkpoint: unsupported format_version");
  const std::string kind_str = j.at("model_kind").get<std::string>();
  ModelKind kind;
  if (kind_str == "iqn") {
    kind = ModelKind::Iqn;
  } else if (kind_str == "dqn") {
    kind = ModelKind::Dqn;
  } else {
    throw std::runtime_error("load_checkpoint: unknown model_kind " + kind_str);
  }

  Checkpoint ckpt;
  std::mt19937_64 rng(0);
  ckpt.model = make_model(kind, rng);
  if (j.at("layer_specs") != layer_specs(ckpt.model))
    throw std::runtime_error("load_checkpoint: layer shape mismatch");
  const auto flat = j.at("params").get<std::vector<double>>();
  if (flat.size() != param_count(ckpt.model))
    throw std::runtime_error("load_checkpoint: parameter count mismatch");
  unflatten_params(ckpt.model, flat);
  ckpt.training_step = j.at("training_step").get<std::int64_t>();
  ckpt.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return ckpt;
}

}  // namespace vnav::rl
