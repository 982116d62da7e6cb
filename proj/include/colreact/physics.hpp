#pragma once

#include <span>
#include <string>
#include <vector>

#include "colreact/state.hpp"

namespace colreact {

/// Axis-aligned box obstacle. Transparent boxes are solid for the vehicle
/// but invisible to the range sensor.
struct Obstacle {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);
  bool transparent = false;
  std::string name;

  Vec3 min_corner() const { return center - half_extents; }
  Vec3 max_corner() const { return center + half_extents; }
};

Vec3 closest_point_on_box(const Obstacle& box, const Vec3& p);
/// Euclidean distance from p to the box (0 inside).
double distance_to_box(const Obstacle& box, const Vec3& p);

struct Contact {
  std::size_t obstacle = 0;
  Vec3 normal = Vec3::Zero();  // from the obstacle toward the cage center
  double approach_speed = 0.0; // > 0, speed into the obstacle before the impulse
  Vec3 delta_v = Vec3::Zero();
};

struct PhysicsParams {
  double cage_radius = 0.23;
  double restitution = 0.3;
};

struct DynamicsStep {
  State state;
  Vec3 contact_accel = Vec3::Zero();  // sum of delta_v / dt over this step's impulses
  std::vector<Contact> contacts;
};

/// Integrates the commanded acceleration exactly over dt, then resolves
/// cage/box penetration: the cage is pushed back onto the surface and, if
/// it was moving into the box, the normal velocity is reflected with the
/// restitution coefficient.
DynamicsStep step_dynamics(const State& state, const Vec3& accel_cmd,
                           std::span<const Obstacle> obstacles, double dt,
                           const PhysicsParams& params);

}  // namespace colreact
