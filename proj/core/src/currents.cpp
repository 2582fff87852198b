#include "vnav/currents.hpp"

namespace vnav {

Vec2 rankine_velocity(const Vortex& vortex, const Vec2& point) {
  const Vec2 radial = point - vortex.center;
  const double r = radial.norm();
  if (r == 0.0) return {0.0, 0.0};

  const double gamma = vortex.circulation_gamma;
  const double r0 = vortex.core_radius;
  double v_theta;
  if (r <= r0) {
    v_theta = gamma / (2.0 * M_PI) * r / (r0 * r0);
  } else {
    v_theta = gamma / (2.0 * M_PI) / r;
  }
  // Tangential direction: radial rotated 90 deg CCW; sign of gamma flips it.
  const Vec2 tangent{-radial.y / r, radial.x / r};
  return tangent * v_theta;
}

Vec2 current_at(const std::vector<Vortex>& vortices, const Vec2& point) {
  Vec2 v{0.0, 0.0};
  for (const auto& vortex : vortices) v += rankine_velocity(vortex, point);
  return v;
}

}  // namespace vnav
