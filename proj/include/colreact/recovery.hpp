#pragma once

#include <functional>

#include "colreact/estimation.hpp"
#include "colreact/geometry.hpp"
#include "colreact/state.hpp"

namespace colreact {

struct RecoveryConfig {
  double d_star = 1.0;             // upper bound on the obstacle distance that still bends the reaction
  double reaction_distance = 0.46; // magnitude scale of the recovery displacement
  double cage_radius = 0.23;

  void validate() const;
};

struct RecoveryCommand {
  Vec3 setpoint_world = Vec3::Zero();
  double issued_t = 0.0;
  Vec3 offset_body = Vec3::Zero();  // the body-frame recovery position
  double weight = 0.0;
  double distance = 0.0;            // EDT value used for the weight
};

/// Distance to the nearest mapped obstacle and its spatial gradient (world frame).
struct DistanceSample {
  double distance = 0.0;
  Vec3 gradient = Vec3::Zero();
};

using DistanceQuery = std::function<DistanceSample(const Vec3& world_position)>;

/// Blend weight between the obstacle-gradient direction and the bounce
/// direction. `d` is clamped to the cage radius from below, so contact
/// distances yield 1 and distances beyond d_star yield 0.
double recovery_weight(double d, const RecoveryConfig& cfg);

/// Body-frame recovery position. Falls back to a pure bounce (-direction * R_d)
/// when the weight is zero or the gradient has norm below 1e-9.
Vec3 recovery_position_body(const Vec3& direction, const Vec3& edt_gradient_body, double d,
                            const RecoveryConfig& cfg);

/// Queries the pre-collision map at the current position and turns the
/// collision event into a world-frame position setpoint.
RecoveryCommand issue_recovery(const CollisionEvent& event, const Pose& pose,
                               const DistanceQuery& map_query, const RecoveryConfig& cfg,
                               double now);

struct ControllerGains {
  double kp = 36.0;    // 1/s^2
  double kd = 12.0;    // 1/s
  double a_max = 8.0;  // m/s^2
};

/// PD position law with optional velocity/acceleration feedforward, clamped
/// to a_max in norm. Stands in for the autopilot's cascaded loops.
Vec3 position_controller_step(const State& state, const Vec3& setpoint_world, double dt,
                              const ControllerGains& gains,
                              const Vec3& velocity_ref = Vec3::Zero(),
                              const Vec3& accel_ff = Vec3::Zero());

}  // namespace colreact
