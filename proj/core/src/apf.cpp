#include "vnav/apf.hpp"

#include <stdexcept>

namespace vnav {

namespace {

constexpr double kDegenerateDistance = 1e-6;

double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// (1/d - 1/d0)^2 * d_g^n repulsion kernel and its gradient, shared by the
// static and dynamic position terms.
Vec2 repulsion_position_gradient(const Vec2& position, const Vec2& entity, const Vec2& goal,
                                 const ApfParams& params) {
  const Vec2 to_entity = position - entity;
  const double d = to_entity.norm();
  if (d < kDegenerateDistance)
    throw std::domain_error("apf: coincident robot and entity positions");
  if (d > params.d0) return {0.0, 0.0};

  const Vec2 to_goal = position - goal;
  const double d_g = to_goal.norm();
  const double gap = 1.0 / d - 1.0 / params.d0;
  const int n = params.n_exponent;

  Vec2 grad = (params.k_rep * gap * (-1.0 / (d * d)) * pow_int(d_g, n) / d) * to_entity;
  if (d_g > kDegenerateDistance) {
    grad += (0.5 * params.k_rep * gap * gap * n * pow_int(d_g, n - 1) / d_g) * to_goal;
  }
  return grad;
}

double repulsion_position_potential(const Vec2& position, const Vec2& entity, const Vec2& goal,
                                    const ApfParams& params) {
  const double d = (position - entity).norm();
  if (d < kDegenerateDistance)
    throw std::domain_error("apf: coincident robot and entity positions");
  if (d > params.d0) return 0.0;
  const double gap = 1.0 / d - 1.0 / params.d0;
  return 0.5 * params.k_rep * gap * gap * pow_int((position - goal).norm(), params.n_exponent);
}

}  // namespace

double apf_total_potential(const WorldView& view, const Vec2& position, const ApfParams& params) {
  double u = 0.5 * params.k_att * (position - view.goal).norm_sq();
  for (const auto& o : view.statics) {
    u += repulsion_position_potential(position, o.center, view.goal, params);
  }
  for (const auto& dyn : view.dynamics) {
    const Vec2 to_entity = dyn.position - position;
    const double d = to_entity.norm();
    if (d < kDegenerateDistance)
      throw std::domain_error("apf: coincident robot and entity positions");
    if (d > params.d0) continue;
    u += repulsion_position_potential(position, dyn.position, view.goal, params);
    const Vec2 rel_vel = view.velocity - dyn.velocity;
    const double v_ao = rel_vel.dot(to_entity / d);
    if (v_ao > 0.0) u += params.k_v * v_ao / d;
  }
  return u;
}

Vec2 apf_total_force(const WorldView& view, const ApfParams& params) {
  Vec2 grad = params.k_att * (view.position - view.goal);

  for (const auto& o : view.statics) {
    grad += repulsion_position_gradient(view.position, o.center, view.goal, params);
  }
  for (const auto& dyn : view.dynamics) {
    const Vec2 to_entity = dyn.position - view.position;
    const double d = to_entity.norm();
    if (d < kDegenerateDistance)
      throw std::domain_error("apf: coincident robot and entity positions");
    if (d > params.d0) continue;
    grad += repulsion_position_gradient(view.position, dyn.position, view.goal, params);
    const Vec2 e = to_entity / d;
    const Vec2 rel_vel = view.velocity - dyn.velocity;
    const double v_ao = rel_vel.dot(e);
    if (v_ao > 0.0) {
      grad += (params.k_v / (d * d)) * (2.0 * v_ao * e - rel_vel);
    }
  }
  return {-grad.x, -grad.y};
}

Action apf_action(const Vec2& force, const RobotState& state, double dt,
                  const ApfParams& params) {
  if (force.norm() < kDegenerateDistance) return {0.0, 0.0};

  const double force_dir = std::atan2(force.y, force.x);
  // Preference order on exact ties: zero first, then the negative option.
  constexpr std::array<double, 3> turn_order = {0.0, -0.52, 0.52};
  double best_turn = turn_order[0];
  double best_err = std::abs(angle_diff(force_dir, state.heading + turn_order[0] * dt));
  for (std::size_t i = 1; i < turn_order.size(); ++i) {
    const double err = std::abs(angle_diff(force_dir, state.heading + turn_order[i] * dt));
    if (err < best_err) {
      best_err = err;
      best_turn = turn_order[i];
    }
  }

  const Vec2 vel_dir{std::cos(state.heading), std::sin(state.heading)};
  const double target = params.accel_scale * force.dot(vel_dir);
  constexpr std::array<double, 3> accel_order = {0.0, -0.4, 0.4};
  double best_accel = accel_order[0];
  double best_gap = std::abs(accel_order[0] - target);
  for (std::size_t i = 1; i < accel_order.size(); ++i) {
    const double gap = std::abs(accel_order[i] - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_accel = accel_order[i];
    }
  }
  return {best_accel, best_turn};
}

Action apf_policy(const WorldView& view, const ApfParams& params) {
  const Vec2 force = apf_total_force(view, params);
  RobotState state;
  state.position = view.position;
  state.heading = view.heading;
  state.steer_speed = view.steer_speed;
  return apf_action(force, state, view.dt, params);
}

}  // namespace vnav
