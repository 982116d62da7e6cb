#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "colreact/errors.hpp"
#include "colreact/voxel_map.hpp"

using namespace colreact;

namespace {

MapConfig small_map(int n = 16) {
  MapConfig c;
  c.resolution = 0.1;
  c.origin = Vec3::Zero();
  c.dims = {n, n, n};
  return c;
}

Obb voxel_box(const VoxelMap& m, const VoxelIndex& v) {
  Obb b;
  b.center = m.center(v);
  b.half_extents = Vec3::Constant(0.01);
  return b;
}

double nearest_occupied(const VoxelMap& m, const Vec3& p) {
  double best = m.config().max_distance;
  for (std::size_t i = 0; i < m.voxel_count(); ++i) {
    const VoxelIndex v = m.unlinear(i);
    if (m.state(v) == VoxelState::Occupied) best = std::min(best, (m.center(v) - p).norm());
  }
  return best;
}

}  // namespace

TEST(VoxelMap, StartsUnknownWithSentinelDistance) {
  VoxelMap m(small_map(8));
  const auto c = m.state_counts();
  EXPECT_EQ(c[0], 512u);
  EXPECT_EQ(c[1] + c[2], 0u);
  m.compute_edt();
  for (std::size_t i = 0; i < m.voxel_count(); ++i) {
    EXPECT_DOUBLE_EQ(m.edt(m.unlinear(i)), m.config().max_distance);
  }
}

TEST(VoxelMap, SingleVoxelDistances) {
  VoxelMap m(small_map());
  ASSERT_TRUE(m.register_collision(voxel_box(m, {0, 0, 0})));
  EXPECT_EQ(m.registry().size(), 1u);
  EXPECT_EQ(m.registry().front().voxel_count, 1u);
  EXPECT_EQ(m.state_counts()[2], 1u);
  EXPECT_NEAR(m.edt({3, 0, 0}), 0.3, 1e-12);
  EXPECT_NEAR(m.edt({0, 0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(m.query_distance(m.center({0, 0, 0})), 0.0, 1e-12);
  // Halfway between the centers of (3,0,0) and (4,0,0).
  const Vec3 mid = 0.5 * (m.center({3, 0, 0}) + m.center({4, 0, 0}));
  EXPECT_NEAR(m.query_distance(mid), 0.35, 1e-12);
}

TEST(VoxelMap, DistanceIsCapped) {
  MapConfig c = small_map(40);
  c.max_distance = 1.0;
  VoxelMap m(c);
  m.register_collision(voxel_box(m, {0, 0, 0}));
  EXPECT_NEAR(m.edt({9, 0, 0}), 0.9, 1e-12);
  EXPECT_DOUBLE_EQ(m.edt({20, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(m.edt({39, 39, 39}), 1.0);
}

TEST(VoxelMap, MatchesBruteForceOnRandomGrids) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    VoxelMap m(small_map());
    std::bernoulli_distribution occ(0.1);
    for (std::size_t i = 0; i < m.voxel_count(); ++i) {
      if (occ(rng)) m.register_collision(voxel_box(m, m.unlinear(i)));
    }
    for (std::size_t i = 0; i < m.voxel_count(); ++i) {
      const VoxelIndex v = m.unlinear(i);
      EXPECT_NEAR(m.edt(v), nearest_occupied(m, m.center(v)), 1e-9);
    }
    // Off-center queries stay within one voxel diagonal of the true distance.
    std::uniform_real_distribution<double> u(0.0, 1.6);
    for (int q = 0; q < 200; ++q) {
      const Vec3 p(u(rng), u(rng), u(rng));
      EXPECT_LE(std::abs(m.query_distance(p) - nearest_occupied(m, p)), std::sqrt(3.0) * 0.1);
    }
  }
}

TEST(VoxelMap, RegisteredVoxelsMatchPointInBox) {
  VoxelMap m(small_map(30));
  Obb b;
  b.center = Vec3(1.5, 1.4, 1.6);
  b.half_extents = Vec3(0.5, 0.3, 0.1);
  b.orientation = Rotation::yaw(0.6) * Rotation::pitch(0.3);
  ASSERT_TRUE(m.register_collision(b, 1.0));
  std::size_t expected = 0;
  const Mat3 rt = b.orientation.matrix().transpose();
  for (std::size_t i = 0; i < m.voxel_count(); ++i) {
    const VoxelIndex v = m.unlinear(i);
    const Vec3 local = rt * (m.center(v) - b.center);
    const bool inside = (local.cwiseAbs() - b.half_extents).maxCoeff() <= 1e-9;
    if (inside) ++expected;
    EXPECT_EQ(m.is_collision_voxel(v), inside);
    EXPECT_EQ(m.state(v) == VoxelState::Occupied, inside);
  }
  EXPECT_EQ(m.registry().front().voxel_count, expected);
  EXPECT_DOUBLE_EQ(m.registry().front().t, 1.0);
}

TEST(VoxelMap, RegistrationOutsideIsNoOp) {
  VoxelMap m(small_map());
  Obb b;
  b.center = Vec3(10, 10, 10);
  b.half_extents = Vec3::Constant(0.3);
  EXPECT_FALSE(m.register_collision(b));
  EXPECT_TRUE(m.registry().empty());
  EXPECT_EQ(m.state_counts()[2], 0u);
}

TEST(VoxelMap, SingleRayMarksWallAndFreesPath) {
  VoxelMap m(small_map(32));
  const Pose pose{Rotation::identity(), Vec3(0.25, 1.05, 1.05)};
  m.integrate_scan(pose, {Vec3(2.05, 1.05, 1.05)}, 10.0);
  EXPECT_EQ(m.state({20, 10, 10}), VoxelState::Occupied);
  for (int i = 2; i < 20; ++i) EXPECT_EQ(m.state({i, 10, 10}), VoxelState::Free) << i;
  EXPECT_EQ(m.state({21, 10, 10}), VoxelState::Unknown);
  EXPECT_NEAR(m.edt({15, 10, 10}), 0.5, 1e-12);
}

TEST(VoxelMap, ScanFromOutsideThrows) {
  VoxelMap m(small_map());
  EXPECT_THROW(m.integrate_scan(Pose{Rotation::identity(), Vec3(-1, 0.5, 0.5)}, {}, 10.0),
               OutOfBoundsError);
}

TEST(VoxelMap, CollisionVoxelsSurviveClearingScans) {
  VoxelMap m(small_map(32));
  Obb b;
  b.center = Vec3(1.6, 1.6, 1.6);
  b.half_extents = Vec3(0.05, 0.3, 0.3);
  ASSERT_TRUE(m.register_collision(b));
  std::vector<VoxelIndex> box;
  for (std::size_t i = 0; i < m.voxel_count(); ++i) {
    if (m.is_collision_voxel(m.unlinear(i))) box.push_back(m.unlinear(i));
  }
  const Pose pose{Rotation::identity(), Vec3(0.35, 1.6, 1.6)};
  std::vector<Vec3> hits;
  for (double y = 1.3; y <= 1.9; y += 0.05)
    for (double z = 1.3; z <= 1.9; z += 0.05) hits.emplace_back(3.1, y, z);
  for (int s = 0; s < 1000; ++s) m.integrate_scan(pose, {}, 2.6, hits);
  for (const auto& v : box) {
    EXPECT_EQ(m.state(v), VoxelState::Occupied);
    EXPECT_DOUBLE_EQ(m.edt(v), 0.0);
  }
  EXPECT_EQ(m.registry().size(), 1u);
}

TEST(VoxelMap, ScanUpdatesAreOrderIndependent) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::vector<Vec3> hits;
  for (int i = 0; i < 400; ++i) hits.emplace_back(u(rng), u(rng), u(rng));
  std::vector<Vec3> shuffled = hits;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  VoxelMap a(small_map(32)), b(small_map(32));
  const Pose pose{Rotation::identity(), Vec3(1.6, 1.6, 1.6)};
  for (int s = 0; s < 3; ++s) {
    a.integrate_scan(pose, hits, 10.0);
    b.integrate_scan(pose, shuffled, 10.0);
  }
  for (std::size_t i = 0; i < a.voxel_count(); ++i) {
    const VoxelIndex v = a.unlinear(i);
    ASSERT_EQ(a.logodds(v), b.logodds(v));
    ASSERT_EQ(a.state(v), b.state(v));
    ASSERT_EQ(a.squared_voxel_distance(v), b.squared_voxel_distance(v));
  }
}

TEST(VoxelMap, IncrementalEdtEqualsFullRecompute) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.2, 4.6);
  MapConfig c = small_map(48);
  c.max_distance = 1.0;
  // Window covers the sensor range plus the distance cap, so nothing the
  // scan can change lies outside the recomputed region.
  c.local_window = 15 + 11;
  VoxelMap m(c);
  for (int s = 0; s < 6; ++s) {
    std::vector<Vec3> hits;
    for (int i = 0; i < 200; ++i) hits.emplace_back(u(rng), u(rng), u(rng));
    m.integrate_scan(Pose{Rotation::identity(), Vec3(2.4, 2.4, 2.4)}, hits, 1.5);
  }
  VoxelMap full = m;
  full.compute_edt();
  for (std::size_t i = 0; i < m.voxel_count(); ++i) {
    const VoxelIndex v = m.unlinear(i);
    ASSERT_EQ(m.squared_voxel_distance(v), full.squared_voxel_distance(v));
  }
}

TEST(VoxelMap, UnknownVoxelsAreNotObstacles) {
  VoxelMap m(small_map());
  m.compute_edt();
  EXPECT_DOUBLE_EQ(m.query_distance(Vec3(0.8, 0.8, 0.8)), m.config().max_distance);
}

TEST(VoxelMap, GradientPointsAwayFromObstacle) {
  VoxelMap m(small_map(32));
  m.register_collision(voxel_box(m, {10, 16, 16}));
  const Vec3 g = m.query_gradient(m.center({15, 16, 16}));
  EXPECT_NEAR(g.normalized().x(), 1.0, 1e-9);
}

TEST(VoxelMap, GradientVanishesBetweenTwinObstacles) {
  VoxelMap m(small_map(32));
  m.register_collision(voxel_box(m, {10, 16, 16}));
  m.register_collision(voxel_box(m, {20, 16, 16}));
  EXPECT_LT(m.query_gradient(m.center({15, 16, 16})).norm(), 1e-9);
}

TEST(VoxelMap, GradientMatchesAnalyticField) {
  VoxelMap m(small_map(40));
  const VoxelIndex o{20, 20, 20};
  m.register_collision(voxel_box(m, o));
  const Vec3 c = m.center(o);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> r(0.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    const Vec3 p = c + r(rng) * dir;
    const Vec3 g = m.query_gradient(p);
    EXPECT_LE((g - dir).norm(), 0.1) << p.transpose();
  }
}

TEST(VoxelMap, QueriesCheckBounds) {
  VoxelMap m(small_map());
  EXPECT_THROW(m.query_distance(Vec3(-0.01, 0.5, 0.5)), OutOfBoundsError);
  EXPECT_THROW(m.query_gradient(Vec3(0.05, 0.5, 0.5)), OutOfBoundsError);
  EXPECT_NO_THROW(m.query_gradient(Vec3(0.15, 0.5, 0.5)));
}

TEST(VoxelMap, RejectsBadConfig) {
  MapConfig c = small_map();
  c.occupied_threshold = 1.0;
  EXPECT_THROW(VoxelMap{c}, ConfigError);
  c = small_map();
  c.dims = {0, 4, 4};
  EXPECT_THROW(VoxelMap{c}, ConfigError);
}
