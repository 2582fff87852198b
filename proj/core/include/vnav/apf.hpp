#pragma once

#include "vnav/world.hpp"

namespace vnav {

struct ApfParams {
  double k_att = 50.0;
  double k_rep = 500.0;
  double k_v = 1.0;
  int n_exponent = 2;
  double d0 = 10.0;              // m, influence distance
  double accel_scale = 1.0 / 50.0;  // force -> accel mapping scale (1/k_att)
};

// Total potential energy at the view's configuration, with entity positions
// and velocities held fixed. Test oracle for the analytic force.
double apf_total_potential(const WorldView& view, const Vec2& position, const ApfParams& params);

// Negative analytic gradient of the attractive plus repulsive potentials.
// Throws std::domain_error on coincident entity positions (d < 1e-6).
Vec2 apf_total_force(const WorldView& view, const ApfParams& params);

// Map a force vector onto the discrete action set: turn toward the force
// direction, accelerate by the scaled force component along the velocity
// direction. Ties prefer zero, then the negative option.
Action apf_action(const Vec2& force, const RobotState& state, double dt,
                  const ApfParams& params);

Action apf_policy(const WorldView& view, const ApfParams& params = {});

}  // namespace vnav
