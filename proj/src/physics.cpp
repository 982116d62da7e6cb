#include "colreact/physics.hpp"

#include <cmath>

#include "colreact/errors.hpp"

namespace colreact {

Vec3 closest_point_on_box(const Obstacle& box, const Vec3& p) {
  return p.cwiseMax(box.min_corner()).cwiseMin(box.max_corner());
}

double distance_to_box(const Obstacle& box, const Vec3& p) {
  return (p - closest_point_on_box(box, p)).norm();
}

DynamicsStep step_dynamics(const State& state, const Vec3& accel_cmd,
                           std::span<const Obstacle> obstacles, double dt,
                           const PhysicsParams& params) {
  if (!(dt > 0.0)) throw DegenerateInputError("physics dt must be > 0");
  DynamicsStep out;
  State& s = out.state;
  s.acceleration = accel_cmd;
  s.position = state.position + state.velocity * dt + 0.5 * accel_cmd * dt * dt;
  s.velocity = state.velocity + accel_cmd * dt;

  const double l = params.cage_radius;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Obstacle& box = obstacles[i];
    const Vec3 closest = closest_point_on_box(box, s.position);
    const Vec3 diff = s.position - closest;
    const double dist = diff.norm();
    if (dist >= l) continue;

    Vec3 normal;
    Vec3 surface = closest;
    if (dist > 1e-12) {
      normal = diff / dist;
    } else {
      // Center inside the box: leave through the nearest face.
      const Vec3 local = s.position - box.center;
      const Vec3 depth = box.half_extents - local.cwiseAbs();
      int axis = 0;
      depth.minCoeff(&axis);
      normal = Vec3::Zero();
      normal[axis] = local[axis] >= 0.0 ? 1.0 : -1.0;
      surface[axis] = box.center[axis] + normal[axis] * box.half_extents[axis];
    }
    s.position = surface + normal * l;

    const double vn = s.velocity.dot(normal);
    if (vn < 0.0) {
      Contact c;
      c.obstacle = i;
      c.normal = normal;
      c.approach_speed = -vn;
      c.delta_v = -(1.0 + params.restitution) * vn * normal;
      s.velocity += c.delta_v;
      out.contact_accel += c.delta_v / dt;
      out.contacts.push_back(c);
    }
  }
  return out;
}

}  // namespace colreact
