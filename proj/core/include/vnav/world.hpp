#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vnav/currents.hpp"
#include "vnav/geometry.hpp"

namespace vnav {

struct StaticObstacle {
  Vec2 center;
  double radius = 1.0;  // m, > 0
};

enum class RobotStatus { Active, ReachedGoal, Collided, Deactivated };

struct RobotState {
  Vec2 position;
  double heading = 0.0;      // rad, direction of steering velocity, [-pi, pi)
  double steer_speed = 0.0;  // m/s, in [0, v_max]
  Vec2 goal;
  RobotStatus status = RobotStatus::Active;
};

// Discrete joint action: 3 accelerations x 3 turn rates, accel-major.
// index = accel_index * 3 + turn_index with accel in {-0.4, 0.0, 0.4} m/s^2
// and turn rate in {-0.52, 0.0, 0.52} rad/s.
struct Action {
  double accel = 0.0;
  double turn_rate = 0.0;
};

inline constexpr int kNumActions = 9;
inline constexpr std::array<double, 3> kAccelValues = {-0.4, 0.0, 0.4};
inline constexpr std::array<double, 3> kTurnRateValues = {-0.52, 0.0, 0.52};

inline Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) throw std::out_of_range("action index");
  return {kAccelValues[index / 3], kTurnRateValues[index % 3]};
}

inline int action_index(const Action& a) {
  int ai = -1, wi = -1;
  for (int i = 0; i < 3; ++i) {
    if (kAccelValues[i] == a.accel) ai = i;
    if (kTurnRateValues[i] == a.turn_rate) wi = i;
  }
  if (ai < 0 || wi < 0) throw std::invalid_argument("action not in discrete set");
  return ai * 3 + wi;
}

struct WorldParams {
  double dt = 0.2;               // s per control step
  double v_max = 2.0;            // m/s
  double robot_radius = 0.8;     // m
  double goal_threshold = 2.0;   // m
  double detection_range = 15.0; // m
  double workspace_extent = 50.0; // m, square side length
};

// Fixed-size observation: 4 ego + 5x3 static slots + 5x4 dynamic slots.
inline constexpr int kMaxStaticSlots = 5;
inline constexpr int kMaxDynamicSlots = 5;
inline constexpr int kObservationSize = 4 + kMaxStaticSlots * 3 + kMaxDynamicSlots * 4;

using Observation = std::array<double, kObservationSize>;

struct World {
  std::vector<RobotState> robots;
  std::vector<StaticObstacle> obstacles;
  std::vector<Vortex> vortices;
  double sim_time = 0.0;
  WorldParams params;
};

// Ground-truth view of the surroundings of one robot, clipped to the
// detection range. Shared input of the classical planners and the adaptive
// risk threshold. Velocities are total ground velocities (steering + current).
struct WorldView {
  Vec2 position;
  double heading = 0.0;
  double steer_speed = 0.0;
  Vec2 velocity;  // ego total velocity
  Vec2 goal;
  double robot_radius = 0.8;
  double v_max = 2.0;
  double dt = 0.2;
  std::vector<StaticObstacle> statics;
  struct DynamicEntity {
    Vec2 position;
    Vec2 velocity;  // total ground velocity
  };
  std::vector<DynamicEntity> dynamics;
};

// Total ground velocity of a robot: steering velocity plus local current.
Vec2 total_velocity(const World& world, const RobotState& robot);

// One control step of a single robot under the semi-implicit update:
// controls are applied first, then the displacement uses the updated
// steering velocity plus the local current.
RobotState step_robot(const RobotState& state, const Action& action,
                      const std::vector<Vortex>& vortices, const WorldParams& params);

// Robot-frame observation with distance-sorted, zero-padded neighbor slots.
Observation observe(const World& world, std::size_t robot_id);

WorldView make_world_view(const World& world, std::size_t robot_id);

// Collision / goal detection after a step. Collision takes precedence.
// Boundary contact counts as collision.
RobotStatus transition_status(const World& world, std::size_t robot_id);

double reward(const RobotState& prev, const RobotState& next, RobotStatus status);

// Advance every Active robot synchronously by one control step, update
// statuses against the new positions, and advance the clock.
void step_world(World& world, const std::vector<Action>& actions);

}  // namespace vnav
