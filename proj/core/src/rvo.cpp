#include "vnav/rvo.hpp"

#include <algorithm>
#include <stdexcept>

namespace vnav {

VelocityCone velocity_obstacle(const Vec2& ego_pos, double ego_radius, const Vec2& other_pos,
                               double other_radius, const Vec2& other_vel) {
  const Vec2 offset = other_pos - ego_pos;
  const double d = offset.norm();
  const double r_sum = ego_radius + other_radius;
  if (d <= r_sum) throw std::domain_error("velocity_obstacle: discs already overlap");

  VelocityCone cone;
  cone.apex = other_vel;
  cone.axis_dir = offset / d;
  cone.half_angle = std::asin(r_sum / d);
  cone.entity_offset = offset;
  cone.combined_radius = r_sum;
  return cone;
}

VelocityCone reciprocal_velocity_obstacle(const VelocityCone& vo, const Vec2& ego_vel,
                                          const Vec2& other_vel) {
  VelocityCone cone = vo;
  cone.apex = (ego_vel + other_vel) * 0.5;
  return cone;
}

double time_to_collision(const Vec2& candidate_vel, const std::vector<VelocityCone>& cones) {
  double tc = kInfiniteTime;
  for (const auto& cone : cones) {
    const Vec2 w = candidate_vel - cone.apex;
    const double a = w.norm_sq();
    if (a == 0.0) continue;
    const Vec2 u = cone.entity_offset;
    const double wu = w.dot(u);
    const double disc = wu * wu - a * (u.norm_sq() - cone.combined_radius * cone.combined_radius);
    if (disc < 0.0) continue;  // ray misses the disc
    const double t_entry = (wu - std::sqrt(disc)) / a;
    if (t_entry >= 0.0) tc = std::min(tc, t_entry);
  }
  return tc;
}

namespace {

Action map_velocity_to_action(const Vec2& chosen, const WorldView& view) {
  Action action{0.0, 0.0};
  const double speed = chosen.norm();
  if (speed > 1e-12) {
    const double dir = std::atan2(chosen.y, chosen.x);
    constexpr std::array<double, 3> turn_order = {0.0, -0.52, 0.52};
    double best_err = std::abs(angle_diff(dir, view.heading + turn_order[0] * view.dt));
    for (std::size_t i = 1; i < turn_order.size(); ++i) {
      const double err = std::abs(angle_diff(dir, view.heading + turn_order[i] * view.dt));
      if (err < best_err) {
        best_err = err;
        action.turn_rate = turn_order[i];
      }
    }
  }
  constexpr std::array<double, 3> accel_order = {0.0, -0.4, 0.4};
  double best_gap = std::numeric_limits<double>::infinity();
  for (const double a : accel_order) {
    const double next_speed = std::clamp(view.steer_speed + a * view.dt, 0.0, view.v_max);
    const double gap = std::abs(next_speed - speed);
    if (gap < best_gap) {
      best_gap = gap;
      action.accel = a;
    }
  }
  return action;
}

}  // namespace

Action rvo_policy(const WorldView& view, const RvoParams& params) {
  std::vector<VelocityCone> cones;
  for (const auto& o : view.statics) {
    const double margin =
        std::min(params.safety_margin,
                 std::max(0.0, (o.center - view.position).norm() - o.radius - view.robot_radius -
                                   1e-9));
    if ((o.center - view.position).norm() <= o.radius + view.robot_radius)
      continue;  // already in contact
    cones.push_back(velocity_obstacle(view.position, view.robot_radius + margin, o.center,
                                      o.radius, {0.0, 0.0}));
  }
  for (const auto& dyn : view.dynamics) {
    const double d = (dyn.position - view.position).norm();
    if (d <= 2.0 * view.robot_radius) continue;
    const double margin =
        std::min(params.safety_margin, std::max(0.0, d - 2.0 * view.robot_radius - 1e-9));
    const VelocityCone vo = velocity_obstacle(view.position, view.robot_radius + margin,
                                              dyn.position, view.robot_radius, dyn.velocity);
    cones.push_back(reciprocal_velocity_obstacle(vo, view.velocity, dyn.velocity));
  }

  const Vec2 to_goal = view.goal - view.position;
  const double goal_dist = to_goal.norm();
  const Vec2 v_pref =
      goal_dist > 1e-12 ? to_goal * (params.preferred_speed / goal_dist) : Vec2{0.0, 0.0};
  // Headings are enumerated relative to the preferred direction so that exact
  // penalty ties in mirror-symmetric encounters break to the same rotational
  // side for every robot.
  const double base_ang = goal_dist > 1e-12 ? std::atan2(to_goal.y, to_goal.x) : 0.0;

  Vec2 best_vel = v_pref;
  double best_penalty = std::numeric_limits<double>::infinity();
  Vec2 best_tc_vel{0.0, 0.0};
  double best_tc = -1.0;
  bool found = false;
  for (int si = 0; si < params.speed_samples; ++si) {
    const double speed = params.preferred_speed * (si + 1) / params.speed_samples;
    for (int hi = 0; hi < params.heading_samples; ++hi) {
      const double ang = base_ang + 2.0 * M_PI * hi / params.heading_samples;
      const Vec2 v{speed * std::cos(ang), speed * std::sin(ang)};
      const double tc = time_to_collision(v, cones);
      if (tc > best_tc) {
        best_tc = tc;
        best_tc_vel = v;
      }
      if (tc < params.tc_horizon) continue;  // collides too soon to be admissible
      const double penalty =
          (std::isinf(tc) ? 0.0 : params.penalty_weight / tc) + (v_pref - v).norm();
      if (penalty < best_penalty) {
        best_penalty = penalty;
        best_vel = v;
        found = true;
      }
    }
  }
  // All sampled velocities collide immediately: take the least-bad one.
  if (!found) best_vel = best_tc_vel;

  return map_velocity_to_action(best_vel, view);
}

}  // namespace vnav
