#pragma once

#include <cstdint>
#include <random>

#include "vnav/world.hpp"

namespace vnav {

struct CurriculumLevel {
  int num_robots = 3;
  int num_vortices = 4;
  int num_obstacles = 0;
  double min_start_goal_distance = 30.0;  // m
};

struct EnvGenParams {
  double obstacle_radius = 1.0;       // m
  double gamma_min = M_PI;            // m^2/s
  double gamma_max = 4.0 * M_PI;      // m^2/s
  double core_radius_min = 3.0;       // m
  double core_radius_max = 8.0;       // m
  double peak_current_speed = 1.5;    // m/s, cap enforced by rescaling gamma
  double spawn_separation = 5.0;      // m, between starts and between goals
  double spawn_clearance = 1.0;       // m, extra margin to obstacle surfaces
  double initial_speed = 1.0;         // m/s, heading toward goal
  int max_attempts = 10000;           // rejection-sampling bound per entity
};

// Randomized world with the level's exact entity counts. Reproducible from
// the rng state. Throws std::runtime_error if rejection sampling cannot
// satisfy the constraints within the attempt bound.
World generate_environment(const CurriculumLevel& level, const WorldParams& world_params,
                           std::mt19937_64& rng, const EnvGenParams& gen = {});

}  // namespace vnav
