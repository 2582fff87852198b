#include "vnav/envgen.hpp"

#include <stdexcept>

namespace vnav {

namespace {

bool clear_of_obstacles(const Vec2& p, const std::vector<StaticObstacle>& obstacles,
                        double robot_radius, double clearance) {
  for (const auto& o : obstacles) {
    if ((o.center - p).norm() <= o.radius + robot_radius + clearance) return false;
  }
  return true;
}

bool separated(const Vec2& p, const std::vector<Vec2>& points, double min_dist) {
  for (const auto& q : points) {
    if ((q - p).norm() < min_dist) return false;
  }
  return true;
}

}  // namespace

World generate_environment(const CurriculumLevel& level, const WorldParams& world_params,
                           std::mt19937_64& rng, const EnvGenParams& gen) {
  World world;
  world.params = world_params;

  const double extent = world_params.workspace_extent;
  std::uniform_real_distribution<double> coord(0.0, extent);
  auto sample_point = [&] { return Vec2{coord(rng), coord(rng)}; };

  for (int i = 0; i < level.num_obstacles; ++i) {
    int attempts = 0;
    for (;;) {
      if (++attempts > gen.max_attempts)
        throw std::runtime_error("generate_environment: infeasible obstacle placement");
      StaticObstacle o{sample_point(), gen.obstacle_radius};
      bool ok = true;
      for (const auto& prev : world.obstacles) {
        if ((prev.center - o.center).norm() < prev.radius + o.radius) ok = false;
      }
      if (ok) {
        world.obstacles.push_back(o);
        break;
      }
    }
  }

  std::uniform_real_distribution<double> gamma_mag(gen.gamma_min, gen.gamma_max);
  std::uniform_real_distribution<double> core_radius(gen.core_radius_min, gen.core_radius_max);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int i = 0; i < level.num_vortices; ++i) {
    Vortex v;
    v.center = sample_point();
    v.core_radius = core_radius(rng);
    v.circulation_gamma = (sign(rng) == 0 ? -1.0 : 1.0) * gamma_mag(rng);
    // Peak tangential speed sits at r0; rescale gamma if it exceeds the cap.
    const double peak = std::abs(v.circulation_gamma) / (2.0 * M_PI * v.core_radius);
    if (peak > gen.peak_current_speed) {
      v.circulation_gamma *= gen.peak_current_speed / peak;
    }
    world.vortices.push_back(v);
  }

  std::vector<Vec2> starts, goals;
  for (int i = 0; i < level.num_robots; ++i) {
    int attempts = 0;
    for (;;) {
      if (++attempts > gen.max_attempts)
        throw std::runtime_error("generate_environment: infeasible robot placement");
      const Vec2 start = sample_point();
      if (!clear_of_obstacles(start, world.obstacles, world_params.robot_radius,
                              gen.spawn_clearance) ||
          !separated(start, starts, gen.spawn_separation))
        continue;
      const Vec2 goal = sample_point();
      if ((goal - start).norm() < level.min_start_goal_distance) continue;
      if (!clear_of_obstacles(goal, world.obstacles, world_params.robot_radius,
                              gen.spawn_clearance) ||
          !separated(goal, goals, gen.spawn_separation))
        continue;
      starts.push_back(start);
      goals.push_back(goal);
      break;
    }
  }

  for (int i = 0; i < level.num_robots; ++i) {
    RobotState r;
    r.position = starts[i];
    r.goal = goals[i];
    r.heading = wrap_angle(std::atan2(goals[i].y - starts[i].y, goals[i].x - starts[i].x));
    r.steer_speed = std::min(gen.initial_speed, world_params.v_max);
    r.status = RobotStatus::Active;
    world.robots.push_back(r);
  }
  return world;
}

}  // namespace vnav
