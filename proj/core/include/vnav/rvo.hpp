#pragma once

#include <limits>
#include <vector>

#include "vnav/world.hpp"

namespace vnav {

struct RvoParams {
  double penalty_weight = 0.2;   // w_i
  double preferred_speed = 2.0;  // m/s, = v_max
  int speed_samples = 8;
  int heading_samples = 36;
  // Candidates colliding sooner than this are inadmissible outright; the
  // turn-rate-limited vessel needs the slack to realize a chosen velocity.
  double tc_horizon = 5.0;  // s
  // Planning-radius inflation so that grazing an admissible boundary still
  // leaves physical clearance.
  double safety_margin = 0.4;  // m
};

// Collision cone in velocity space: velocities whose relative ray hits the
// inflated entity disc.
struct VelocityCone {
  Vec2 apex;       // m/s
  Vec2 axis_dir;   // unit vector toward the entity
  double half_angle = 0.0;  // rad, asin(R/d)
  // Geometry needed for time-to-collision against this cone's entity.
  Vec2 entity_offset;       // entity center - ego position, m
  double combined_radius = 0.0;  // m
};

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Cone of ego velocities colliding with a disc entity moving at other_vel.
// Throws std::domain_error when the discs already overlap (d <= rA + rB).
VelocityCone velocity_obstacle(const Vec2& ego_pos, double ego_radius, const Vec2& other_pos,
                               double other_radius, const Vec2& other_vel);

// Same cone with the apex translated to the velocity midpoint.
VelocityCone reciprocal_velocity_obstacle(const VelocityCone& vo, const Vec2& ego_vel,
                                          const Vec2& other_vel);

// Earliest ray-disc entry time of the candidate velocity over all cones;
// kInfiniteTime when the relative ray misses every disc. Grazing tangency
// counts as a collision.
double time_to_collision(const Vec2& candidate_vel, const std::vector<VelocityCone>& cones);

// Penalty-minimizing sampled velocity (speed-major candidate enumeration,
// first-lowest-index tie-break), mapped to the discrete action set.
Action rvo_policy(const WorldView& view, const RvoParams& params = {});

}  // namespace vnav
