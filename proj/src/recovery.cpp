#include "colreact/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colreact/errors.hpp"

namespace colreact {

void RecoveryConfig::validate() const {
  if (!(cage_radius > 0.0)) throw ConfigError("recovery.cage_radius must be > 0");
  if (!(d_star > cage_radius)) throw ConfigError("recovery.d_star must exceed the cage radius");
  if (!(reaction_distance > 0.0)) throw ConfigError("recovery.reaction_distance must be > 0");
}

double recovery_weight(double d, const RecoveryConfig& cfg) {
  const double l = cfg.cage_radius;
  const double d_star = cfg.d_star;
  const double dc = std::max(d, l);
  if (dc > d_star) return 0.0;
  const double w = (l * l * l * (dc - d_star)) / (dc * dc * dc * (l - d_star));
  return std::clamp(w, 0.0, 1.0);
}

Vec3 recovery_position_body(const Vec3& direction, const Vec3& edt_gradient_body, double d,
                            const RecoveryConfig& cfg) {
  const double w = recovery_weight(d, cfg);
  const double gnorm = edt_gradient_body.norm();
  if (w == 0.0 || !(gnorm >= 1e-9)) {
    return -direction * cfg.reaction_distance;
  }
  return (w * edt_gradient_body / gnorm - (1.0 - w) * direction) * cfg.reaction_distance;
}

RecoveryCommand issue_recovery(const CollisionEvent& event, const Pose& pose,
                               const DistanceQuery& map_query, const RecoveryConfig& cfg,
                               double now) {
  DistanceSample s;
  if (map_query) s = map_query(pose.translation);
  else s.distance = std::numeric_limits<double>::infinity();

  const Vec3 grad_body = pose.rotation.inverse().apply(s.gradient);
  RecoveryCommand cmd;
  cmd.offset_body = recovery_position_body(event.direction, grad_body, s.distance, cfg);
  cmd.setpoint_world = transform_point(pose, cmd.offset_body);
  cmd.issued_t = now;
  cmd.weight = recovery_weight(s.distance, cfg);
  if (!(s.gradient.norm() >= 1e-9)) cmd.weight = 0.0;
  cmd.distance = s.distance;
  return cmd;
}

Vec3 position_controller_step(const State& state, const Vec3& setpoint_world, double dt,
                              const ControllerGains& gains, const Vec3& velocity_ref,
                              const Vec3& accel_ff) {
  if (!(dt > 0.0)) throw DegenerateInputError("controller dt must be > 0");
  Vec3 a = accel_ff + gains.kp * (setpoint_world - state.position) +
           gains.kd * (velocity_ref - state.velocity);
  const double n = a.norm();
  if (n > gains.a_max) a *= gains.a_max / n;
  return a;
}

}  // namespace colreact
