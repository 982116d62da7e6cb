#pragma once

#include <vector>

#include "colreact/geometry.hpp"

namespace colreact {

/// Circular patch of the collision plane: centered on the body-frame contact
/// point with the plane normal pointing from the cage center to that point.
struct CollisionDisc {
  Vec3 center_body = Vec3::Zero();
  Vec3 normal_body = Vec3::UnitX();
  double radius_rc = 0.0;
  double step = 0.0;
  std::vector<Vec3> points_body;
};

struct Obb {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
  Rotation orientation;  // columns are the box axes in the world frame

  bool contains(const Vec3& p, double tol = 1e-9) const;
  double volume() const { return 8.0 * half_extents.prod(); }
  std::vector<Vec3> corners() const;
};

/// Samples concentric rings (spacing `step`, outermost ring exactly at `rc`)
/// on the disc through `p0` with normal p0/|p0|. Throws DegenerateInputError
/// for p0 = 0, rc <= 0 or step <= 0.
CollisionDisc generate_disc(const Vec3& p0, double rc, double step);

std::vector<Vec3> disc_to_world(const CollisionDisc& disc, const Pose& pose);

/// PCA-aligned bounding box. Each half-extent is at least `thickness_floor`.
/// Throws DegenerateInputError for fewer than three points or a collinear set.
Obb extract_obb(const std::vector<Vec3>& points, double thickness_floor = 0.1);

}  // namespace colreact
