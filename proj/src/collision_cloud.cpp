#include "colreact/collision_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colreact/errors.hpp"

namespace colreact {

bool Obb::contains(const Vec3& p, double tol) const {
  const Vec3 local = orientation.matrix().transpose() * (p - center);
  return (local.cwiseAbs() - half_extents).maxCoeff() <= tol;
}

std::vector<Vec3> Obb::corners() const {
  std::vector<Vec3> out;
  out.reserve(8);
  for (int i = 0; i < 8; ++i) {
    const Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    out.push_back(center + orientation.matrix() * s.cwiseProduct(half_extents));
  }
  return out;
}

CollisionDisc generate_disc(const Vec3& p0, double rc, double step) {
  if (!(p0.norm() > 0.0)) throw DegenerateInputError("disc center coincides with the cage center");
  if (!(rc > 0.0) || !(step > 0.0)) throw DegenerateInputError("disc radius and step must be > 0");

  CollisionDisc disc;
  disc.center_body = p0;
  disc.normal_body = p0.normalized();
  disc.radius_rc = rc;
  disc.step = step;

  // In-plane orthonormal basis.
  const Vec3& n = disc.normal_body;
  const Vec3 helper = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = n.cross(helper).normalized();
  const Vec3 e2 = n.cross(e1);

  std::vector<double> radii;
  for (int k = 0; k * step < rc - 1e-12; ++k) radii.push_back(k * step);
  radii.push_back(rc);

  for (double r : radii) {
    if (r == 0.0) {
      disc.points_body.push_back(p0);
      continue;
    }
    const int count = std::max(3, static_cast<int>(std::ceil(2.0 * M_PI * r / step)));
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * i / count;
      disc.points_body.push_back(p0 + r * (std::cos(a) * e1 + std::sin(a) * e2));
    }
  }
  return disc;
}

std::vector<Vec3> disc_to_world(const CollisionDisc& disc, const Pose& pose) {
  std::vector<Vec3> out;
  out.reserve(disc.points_body.size());
  for (const auto& p : disc.points_body) out.push_back(transform_point(pose, p));
  return out;
}

Obb extract_obb(const std::vector<Vec3>& points, double thickness_floor) {
  if (points.size() < 3) throw DegenerateInputError("OBB needs at least three points");

  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 evals = eig.eigenvalues();  // ascending
  if (!(evals(2) > 0.0) || evals(1) <= 1e-12 * evals(2)) {
    throw DegenerateInputError("points are collinear or coincident");
  }
  // Largest variance first; force a right-handed frame.
  Mat3 axes;
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  axes.col(2) = axes.col(0).cross(axes.col(1)).normalized();
  axes.col(1) = axes.col(2).cross(axes.col(0));

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : points) {
    const Vec3 q = axes.transpose() * (p - mean);
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }

  Obb box;
  box.orientation = Rotation(axes);
  box.center = mean + axes * (0.5 * (lo + hi));
  box.half_extents = (0.5 * (hi - lo)).cwiseMax(Vec3::Constant(thickness_floor));
  return box;
}

}  // namespace colreact
