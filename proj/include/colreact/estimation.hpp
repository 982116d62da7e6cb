#pragma once

#include "colreact/detection.hpp"
#include "colreact/geometry.hpp"

namespace colreact {

/// Spherical protective cage approximating the vehicle.
struct CageModel {
  double radius_l = 0.23;
};

/// Estimated collision, expressed in the body frame at time `t`.
struct CollisionEvent {
  double t = 0.0;
  double intensity_c = 0.0;       // m/s^2
  Vec3 direction = Vec3::UnitX();  // unit, from cage center toward the contact
  double theta = 0.0;             // polar angle [0, pi]
  double phi = 0.0;               // azimuth (-pi, pi]
  Vec3 point_body = Vec3::Zero(); // contact point on the cage
  Vec3 accel_c = Vec3::Zero();    // collision acceleration vector
};

/// Collision acceleration: the negated measurement with the body-frame
/// gravity reaction removed on all axes. At level attitude this is
/// (-a_x, -a_y, -(a_z - g)).
Vec3 collision_acceleration(const ImuSample& sample, double g);

/// Intensity, direction, polar/azimuth angles and cage contact point from a
/// collision acceleration vector. Throws DegenerateInputError when
/// |a_c| < 1e-6. The azimuth is 0 at the poles.
CollisionEvent estimate(const Vec3& a_c, const CageModel& cage, double t = 0.0);

/// Convenience: collision_acceleration followed by estimate.
CollisionEvent estimate_from_sample(const ImuSample& sample, double g, const CageModel& cage);

}  // namespace colreact
