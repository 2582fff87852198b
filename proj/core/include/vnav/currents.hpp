#pragma once

#include <vector>

#include "vnav/geometry.hpp"

namespace vnav {

// Rankine vortex: solid-body rotation inside the core radius, 1/r decay outside.
struct Vortex {
  Vec2 center;
  double circulation_gamma = 0.0;  // m^2/s, sign gives rotation direction
  double core_radius = 1.0;        // m, > 0
};

// Tangential flow velocity induced by a single vortex at `point`.
// Zero vector at the vortex center.
Vec2 rankine_velocity(const Vortex& vortex, const Vec2& point);

// Linear superposition of all vortex contributions.
Vec2 current_at(const std::vector<Vortex>& vortices, const Vec2& point);

}  // namespace vnav
