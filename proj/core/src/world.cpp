#include "vnav/world.hpp"

#include <algorithm>
#include <numeric>

namespace vnav {

Vec2 total_velocity(const World& world, const RobotState& robot) {
  const Vec2 steer{robot.steer_speed * std::cos(robot.heading),
                   robot.steer_speed * std::sin(robot.heading)};
  return steer + current_at(world.vortices, robot.position);
}

RobotState step_robot(const RobotState& state, const Action& action,
                      const std::vector<Vortex>& vortices, const WorldParams& params) {
  if (state.status != RobotStatus::Active)
    throw std::invalid_argument("step_robot: robot is not Active");

  RobotState next = state;
  next.heading = wrap_angle(state.heading + action.turn_rate * params.dt);
  next.steer_speed =
      std::clamp(state.steer_speed + action.accel * params.dt, 0.0, params.v_max);
  const Vec2 steer{next.steer_speed * std::cos(next.heading),
                   next.steer_speed * std::sin(next.heading)};
  const Vec2 velocity = current_at(vortices, state.position) + steer;
  next.position = state.position + velocity * params.dt;
  return next;
}

namespace {

// Indices of entries within `range` of `origin`, sorted by nondecreasing distance.
template <typename GetPos, typename Filter>
std::vector<std::size_t> nearest_in_range(std::size_t count, const Vec2& origin,
                                          double range, GetPos pos, Filter keep) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < count; ++i) {
    if (!keep(i)) continue;
    if ((pos(i) - origin).norm() <= range) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return (pos(a) - origin).norm() < (pos(b) - origin).norm();
  });
  return idx;
}

}  // namespace

Observation observe(const World& world, std::size_t robot_id) {
  if (robot_id >= world.robots.size()) throw std::out_of_range("observe: robot_id");
  const RobotState& ego = world.robots[robot_id];

  Observation obs{};
  const double theta = ego.heading;
  const Vec2 goal_rel = rotate(ego.goal - ego.position, -theta);
  const Vec2 vel_rel = rotate(total_velocity(world, ego), -theta);
  obs[0] = goal_rel.x;
  obs[1] = goal_rel.y;
  obs[2] = vel_rel.x;
  obs[3] = vel_rel.y;

  const auto statics = nearest_in_range(
      world.obstacles.size(), ego.position, world.params.detection_range,
      [&](std::size_t i) { return world.obstacles[i].center; },
      [](std::size_t) { return true; });
  for (std::size_t k = 0; k < std::min<std::size_t>(statics.size(), kMaxStaticSlots); ++k) {
    const StaticObstacle& o = world.obstacles[statics[k]];
    const Vec2 p = rotate(o.center - ego.position, -theta);
    obs[4 + 3 * k + 0] = p.x;
    obs[4 + 3 * k + 1] = p.y;
    obs[4 + 3 * k + 2] = o.radius;
  }

  const auto dynamics = nearest_in_range(
      world.robots.size(), ego.position, world.params.detection_range,
      [&](std::size_t i) { return world.robots[i].position; },
      [&](std::size_t i) {
        return i != robot_id && world.robots[i].status == RobotStatus::Active;
      });
  constexpr std::size_t dyn_base = 4 + 3 * kMaxStaticSlots;
  for (std::size_t k = 0; k < std::min<std::size_t>(dynamics.size(), kMaxDynamicSlots); ++k) {
    const RobotState& other = world.robots[dynamics[k]];
    const Vec2 p = rotate(other.position - ego.position, -theta);
    const Vec2 v = rotate(total_velocity(world, other), -theta);
    obs[dyn_base + 4 * k + 0] = p.x;
    obs[dyn_base + 4 * k + 1] = p.y;
    obs[dyn_base + 4 * k + 2] = v.x;
    obs[dyn_base + 4 * k + 3] = v.y;
  }
  return obs;
}

WorldView make_world_view(const World& world, std::size_t robot_id) {
  if (robot_id >= world.robots.size()) throw std::out_of_range("make_world_view: robot_id");
  const RobotState& ego = world.robots[robot_id];

  WorldView view;
  view.position = ego.position;
  view.heading = ego.heading;
  view.steer_speed = ego.steer_speed;
  view.velocity = total_velocity(world, ego);
  view.goal = ego.goal;
  view.robot_radius = world.params.robot_radius;
  view.v_max = world.params.v_max;
  view.dt = world.params.dt;

  const double range = world.params.detection_range;
  for (const auto& o : world.obstacles) {
    if ((o.center - ego.position).norm() <= range) view.statics.push_back(o);
  }
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    if (i == robot_id || world.robots[i].status != RobotStatus::Active) continue;
    const RobotState& other = world.robots[i];
    if ((other.position - ego.position).norm() <= range)
      view.dynamics.push_back({other.position, total_velocity(world, other)});
  }
  return view;
}

RobotStatus transition_status(const World& world, std::size_t robot_id) {
  if (robot_id >= world.robots.size()) throw std::out_of_range("transition_status: robot_id");
  const RobotState& ego = world.robots[robot_id];
  const double r_rob = world.params.robot_radius;

  for (const auto& o : world.obstacles) {
    if ((o.center - ego.position).norm() <= o.radius + r_rob) return RobotStatus::Collided;
  }
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    if (i == robot_id || world.robots[i].status != RobotStatus::Active) continue;
    if ((world.robots[i].position - ego.position).norm() <= 2.0 * r_rob)
      return RobotStatus::Collided;
  }
  if ((ego.goal - ego.position).norm() <= world.params.goal_threshold)
    return RobotStatus::ReachedGoal;
  return RobotStatus::Active;
}

double reward(const RobotState& prev, const RobotState& next, RobotStatus status) {
  constexpr double r_step = -1.0;
  constexpr double r_collision = -50.0;
  constexpr double r_goal = 100.0;
  const double forward = (prev.goal - prev.position).norm() - (next.goal - next.position).norm();
  double r = r_step + forward;
  if (status == RobotStatus::Collided) r += r_collision;
  if (status == RobotStatus::ReachedGoal) r += r_goal;
  return r;
}

void step_world(World& world, const std::vector<Action>& actions) {
  if (actions.size() != world.robots.size())
    throw std::invalid_argument("step_world: one action per robot required");

  std::vector<RobotState> next = world.robots;
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    if (world.robots[i].status != RobotStatus::Active) continue;
    next[i] = step_robot(world.robots[i], actions[i], world.vortices, world.params);
  }
  world.robots = std::move(next);
  world.sim_time += world.params.dt;

  // Statuses are decided simultaneously from the post-step positions, so a
  // pairwise collision marks both robots.
  std::vector<RobotStatus> status(world.robots.size());
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    status[i] = world.robots[i].status == RobotStatus::Active ? transition_status(world, i)
                                                              : world.robots[i].status;
  }
  for (std::size_t i = 0; i < world.robots.size(); ++i) world.robots[i].status = status[i];
}

}  // namespace vnav
