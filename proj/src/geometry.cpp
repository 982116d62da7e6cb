#include "colreact/geometry.hpp"

#include <cmath>

#include "colreact/errors.hpp"

namespace colreact {

namespace {
constexpr double kRotationTol = 1e-9;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!m.allFinite()) {
    throw DegenerateInputError("rotation matrix has non-finite entries");
  }
  const double ortho_err = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kRotationTol || std::abs(m.determinant() - 1.0) > kRotationTol) {
    throw DegenerateInputError("matrix is not a proper rotation");
  }
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
  if (axis.norm() == 0.0) {
    throw DegenerateInputError("rotation axis is zero");
  }
  Rotation r;
  r.m_ = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return r;
}

Rotation Rotation::inverse() const {
  Rotation r;
  r.m_ = m_.transpose();
  return r;
}

Rotation operator*(const Rotation& a, const Rotation& b) {
  Rotation r;
  r.m_ = a.m_ * b.m_;
  return r;
}

Pose Pose::inverse() const {
  Rotation inv = rotation.inverse();
  return Pose{inv, -inv.apply(translation)};
}

Vec3 transform_point(const Pose& pose, const Vec3& p_body) {
  return pose.rotation.apply(p_body) + pose.translation;
}

Vec3 rotate_world_to_body(const Rotation& world_to_body, const Vec3& v_world) {
  return world_to_body.apply(v_world);
}

bool is_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace colreact
