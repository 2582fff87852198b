#pragma once

#include <cstdint>
#include <string>

#include "vnav/rl/model.hpp"

namespace vnav::rl {

struct Checkpoint {
  Model model;
  std::int64_t training_step = 0;
  std::uint64_t rng_seed = 0;
};

// JSON checkpoint: {format_version, model_kind, layer_specs, params,
// training_step, rng_seed}. Parameters round-trip bit-exactly. Load rejects
// unknown versions, wrong kinds, and shape mismatches.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vnav::rl
