#pragma once

#include <Eigen/Dense>

namespace colreact {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit vector along the world z-axis (up).
inline const Vec3 kUnitZ{0.0, 0.0, 1.0};

/// Proper rotation matrix. Construction validates orthonormality and det = +1.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  /// Right-handed rotation of `angle` radians about `axis` (normalized internally).
  static Rotation from_axis_angle(const Vec3& axis, double angle);
  static Rotation roll(double angle) { return from_axis_angle(Vec3::UnitX(), angle); }
  static Rotation pitch(double angle) { return from_axis_angle(Vec3::UnitY(), angle); }
  static Rotation yaw(double angle) { return from_axis_angle(Vec3::UnitZ(), angle); }

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const;
  Vec3 apply(const Vec3& v) const { return m_ * v; }

  friend Rotation operator*(const Rotation& a, const Rotation& b);

 private:
  Mat3 m_;
};

/// Rigid transform from body frame to world frame.
struct Pose {
  Rotation rotation;  // body -> world
  Vec3 translation = Vec3::Zero();

  static Pose at(const Vec3& position) { return Pose{Rotation::identity(), position}; }
  Pose inverse() const;
};

/// rotation * p_body + translation.
Vec3 transform_point(const Pose& pose, const Vec3& p_body);

/// Expresses a world-frame vector in body axes. `world_to_body` is the attitude
/// as reported by the IMU (world -> body).
Vec3 rotate_world_to_body(const Rotation& world_to_body, const Vec3& v_world);

bool is_finite(const Vec3& v);

constexpr double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

}  // namespace colreact
