#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "colreact/errors.hpp"
#include "colreact/estimation.hpp"

using namespace colreact;

TEST(CollisionAccel, HoverIsZero) {
  const ImuSample s{0.0, Vec3(0, 0, 9.81), Rotation::identity()};
  EXPECT_LT(collision_acceleration(s, 9.81).norm(), 1e-12);
}

TEST(CollisionAccel, SignFlip) {
  const ImuSample s{0.0, Vec3(-20, 0, 9.81), Rotation::identity()};
  const Vec3 a = collision_acceleration(s, 9.81);
  EXPECT_NEAR(a.x(), 20.0, 1e-12);
  EXPECT_NEAR(a.y(), 0.0, 1e-12);
  EXPECT_NEAR(a.z(), 0.0, 1e-12);
}

TEST(CollisionAccel, LevelFormulaVerbatim) {
  const ImuSample s{0.0, Vec3(3.0, -4.0, 21.0), Rotation::identity()};
  const Vec3 a = collision_acceleration(s, 9.81);
  EXPECT_DOUBLE_EQ(a.x(), -3.0);
  EXPECT_DOUBLE_EQ(a.y(), 4.0);
  EXPECT_DOUBLE_EQ(a.z(), -(21.0 - 9.81));
}

TEST(CollisionAccel, RolledHoverCancels) {
  const Rotation r = Rotation::roll(deg_to_rad(10.0));
  const ImuSample s{0.0, r.apply(Vec3(0, 0, 9.81)), r};
  EXPECT_LT(collision_acceleration(s, 9.81).norm(), 1e-9);
}

TEST(Estimate, AxisAligned) {
  const CollisionEvent e = estimate(Vec3(20, 0, 0), CageModel{0.23});
  EXPECT_DOUBLE_EQ(e.intensity_c, 20.0);
  EXPECT_NEAR(e.theta, M_PI / 2, 1e-12);
  EXPECT_NEAR(e.phi, 0.0, 1e-12);
  EXPECT_NEAR((e.direction - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((e.point_body - Vec3(0.23, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(Estimate, TopPole) {
  const CollisionEvent e = estimate(Vec3(0, 0, 15), CageModel{0.23});
  EXPECT_DOUBLE_EQ(e.theta, 0.0);
  EXPECT_DOUBLE_EQ(e.phi, 0.0);
  EXPECT_NEAR((e.direction - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((e.point_body - Vec3(0, 0, 0.23)).norm(), 0.0, 1e-12);
}

TEST(Estimate, ThreeFourFive) {
  const CollisionEvent e = estimate(Vec3(3, 4, 0), CageModel{0.23});
  EXPECT_NEAR(e.intensity_c, 5.0, 1e-12);
  EXPECT_NEAR(e.phi, std::atan2(4.0, 3.0), 1e-12);
  EXPECT_NEAR(e.phi, 0.9273, 1e-4);
  EXPECT_NEAR(e.theta, M_PI / 2, 1e-12);
  EXPECT_NEAR((e.direction - Vec3(0.6, 0.8, 0)).norm(), 0.0, 1e-12);
}

TEST(Estimate, PublishedAnglesRoundTrip) {
  // Front-left, slightly below horizontal: phi = 102.1 deg, theta = 94.2 deg.
  const double th = deg_to_rad(94.2), ph = deg_to_rad(102.1);
  const Vec3 u(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  const CollisionEvent e = estimate(25.0 * u, CageModel{0.23});
  EXPECT_NEAR(rad_to_deg(e.phi), 102.1, 1e-9);
  EXPECT_NEAR(rad_to_deg(e.theta), 94.2, 1e-9);
  EXPECT_GT(e.direction.y(), 0.0);  // left
  EXPECT_LT(e.direction.z(), 0.0);  // below the horizon
}

TEST(Estimate, RejectsDegenerate) {
  EXPECT_THROW(estimate(Vec3::Zero(), CageModel{0.23}), DegenerateInputError);
  EXPECT_THROW(estimate(Vec3(1e-7, 0, 0), CageModel{0.23}), DegenerateInputError);
}

TEST(Estimate, RoundTripRandom) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> m(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 u = Vec3(n(rng), n(rng), n(rng)).normalized();
    const double mag = m(rng);
    const CollisionEvent e = estimate(mag * u, CageModel{0.23});
    EXPECT_NEAR((e.direction - u).norm(), 0.0, 1e-9);
    EXPECT_NEAR(e.intensity_c, mag, 1e-9);
    EXPECT_NEAR(e.point_body.norm(), 0.23, 1e-12);
    EXPECT_GE(e.theta, 0.0);
    EXPECT_LE(e.theta, M_PI);
    EXPECT_GT(e.phi, -M_PI);
    EXPECT_LE(e.phi, M_PI);
  }
}

TEST(Estimate, YawRotationShiftsAzimuth) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int i = 0; i < 500; ++i) {
    const Vec3 a(n(rng), n(rng), n(rng));
    const double alpha = ang(rng);
    const CollisionEvent e0 = estimate(a, CageModel{0.23});
    const CollisionEvent e1 = estimate(Rotation::yaw(alpha).apply(a), CageModel{0.23});
    EXPECT_NEAR(e1.intensity_c, e0.intensity_c, 1e-9);
    EXPECT_NEAR(e1.theta, e0.theta, 1e-9);
    const double d = std::remainder(e1.phi - e0.phi - alpha, 2.0 * M_PI);
    EXPECT_NEAR(d, 0.0, 1e-9);
  }
}

TEST(Estimate, NegativeXAxisAzimuthIsPi) {
  const CollisionEvent e = estimate(Vec3(-1, -0.0, 0), CageModel{0.23});
  EXPECT_DOUBLE_EQ(e.phi, M_PI);
}
