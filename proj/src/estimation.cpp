#include "colreact/estimation.hpp"

#include <cmath>

#include "colreact/errors.hpp"

namespace colreact {

namespace {
constexpr double kMinCollisionAccel = 1e-6;
}

Vec3 collision_acceleration(const ImuSample& sample, double g) {
  return -gravity_compensated(sample, g);
}

CollisionEvent estimate(const Vec3& a_c, const CageModel& cage, double t) {
  if (!is_finite(a_c) || a_c.norm() < kMinCollisionAccel) {
    throw DegenerateInputError("collision acceleration is too small to define a direction");
  }
  CollisionEvent ev;
  ev.t = t;
  ev.accel_c = a_c;
  ev.intensity_c = a_c.norm();

  const double planar = std::hypot(a_c.x(), a_c.y());
  ev.theta = std::atan2(planar, a_c.z());
  ev.phi = planar == 0.0 ? 0.0 : std::atan2(a_c.y(), a_c.x());
  // atan2 returns -pi for (-0, negative x); fold onto the half-open range.
  if (ev.phi <= -M_PI) ev.phi += 2.0 * M_PI;

  const double st = std::sin(ev.theta);
  ev.direction = Vec3(st * std::cos(ev.phi), st * std::sin(ev.phi), std::cos(ev.theta));
  ev.point_body = ev.direction * cage.radius_l;
  return ev;
}

CollisionEvent estimate_from_sample(const ImuSample& sample, double g, const CageModel& cage) {
  return estimate(collision_acceleration(sample, g), cage, sample.t);
}

}  // namespace colreact
