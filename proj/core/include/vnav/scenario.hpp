#pragma once

#include <cstdint>
#include <string>

#include "vnav/world.hpp"

namespace vnav {

// JSON scenario document:
// {params, robots:[{start, goal}], obstacles:[{center, radius}],
//  vortices:[{center, gamma, r0}], seed}
// Positions in meters, gamma in m^2/s. Doubles round-trip losslessly.
std::string scenario_to_json(const World& world, std::uint64_t seed);
World scenario_from_json(const std::string& text, std::uint64_t* seed_out = nullptr);

void save_scenario(const World& world, std::uint64_t seed, const std::string& path);
World load_scenario(const std::string& path, std::uint64_t* seed_out = nullptr);

}  // namespace vnav
