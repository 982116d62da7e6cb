#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "colreact/jerk_profile.hpp"

using namespace colreact;

namespace {

// Closed-form minimum time of a rest-to-rest double-S move of length d.
double double_s_time(double d, double v, double a, double j) {
  double tj, ta;
  if (v * j >= a * a) {
    tj = a / j;
    ta = tj + v / a;
  } else {
    tj = std::sqrt(v / j);
    ta = 2.0 * tj;
  }
  if (d >= v * ta) return d / v + ta;  // cruise phase exists
  tj = a / j;
  ta = tj / 2.0 + std::sqrt(tj * tj / 4.0 + d / a);
  if (ta < 2.0 * tj) {
    tj = std::cbrt(d / (2.0 * j));
    ta = 2.0 * tj;
  }
  return 2.0 * ta;
}

// Dense check that a profile stays inside its limits.
void expect_within(const AxisProfile& p, const AxisLimits& lim, double tol = 1e-9) {
  for (const auto& s : p.segments) {
    EXPECT_GE(s.duration, 0.0);
    EXPECT_LE(std::abs(s.jerk), lim.j_max + tol);
  }
  const double T = p.duration();
  for (int i = 0; i <= 400; ++i) {
    const AxisSample s = p.at(T * i / 400.0);
    EXPECT_LE(std::abs(s.a), lim.a_max + tol);
    EXPECT_LE(std::abs(s.v), lim.v_max + tol);
  }
}

}  // namespace

TEST(Propagate, ConstantJerkKinematics) {
  const AxisSample s = propagate({1.0, 2.0, 3.0}, 6.0, 2.0);
  EXPECT_DOUBLE_EQ(s.a, 15.0);
  EXPECT_DOUBLE_EQ(s.v, 2.0 + 6.0 + 12.0);
  EXPECT_DOUBLE_EQ(s.p, 1.0 + 4.0 + 6.0 + 8.0);
}

TEST(VelocityChange, ReachesTargetAtZeroAcceleration) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(-1.0, 1.0), a(-1.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    const double v0 = v(rng), v1 = v(rng), a0 = a(rng);
    AxisProfile p;
    p.start = {0.0, v0, a0};
    p.segments = velocity_change(v0, a0, v1, 1.5, 3.0);
    const AxisSample e = p.end();
    EXPECT_NEAR(e.v, v1, 1e-9);
    EXPECT_NEAR(e.a, 0.0, 1e-9);
    for (const auto& s : p.segments) EXPECT_LE(std::abs(s.jerk), 3.0);
  }
}

TEST(FastestProfile, SymmetricSCurveForUnitMove) {
  const AxisLimits lim{2.0, 2.0, 4.0};
  const AxisProfile p = fastest_profile({0, 0, 0}, 1.0, 0.0, lim);
  const AxisSample e = p.end();
  EXPECT_NEAR(e.p, 1.0, 1e-9);
  EXPECT_NEAR(e.v, 0.0, 1e-9);
  EXPECT_NEAR(e.a, 0.0, 1e-9);
  const double T = p.duration();
  const AxisSample mid = p.at(T / 2);
  EXPECT_NEAR(mid.p, 0.5, 1e-9);
  double vmax = 0.0;
  for (int i = 0; i <= 1000; ++i) vmax = std::max(vmax, p.at(T * i / 1000.0).v);
  EXPECT_NEAR(mid.v, vmax, 1e-9);
  EXPECT_NEAR(T, double_s_time(1.0, 2.0, 2.0, 4.0), 1e-9);
}

TEST(FastestProfile, MatchesClosedFormTimes) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.01, 8.0), v(0.3, 2.0), a(0.3, 3.0), j(0.5, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const AxisLimits lim{v(rng), a(rng), j(rng)};
    const double dist = d(rng);
    const AxisProfile p = fastest_profile({0, 0, 0}, dist, 0.0, lim);
    EXPECT_NEAR(p.end().p, dist, 1e-7);
    EXPECT_NEAR(p.duration(), double_s_time(dist, lim.v_max, lim.a_max, lim.j_max), 1e-6)
        << dist << " " << lim.v_max << " " << lim.a_max << " " << lim.j_max;
    expect_within(p, lim, 1e-7);
  }
}

TEST(FastestProfile, NegativeMovesMirror) {
  const AxisLimits lim{1.0, 1.5, 3.0};
  const AxisProfile p = fastest_profile({2.0, 0, 0}, -1.5, 0.0, lim);
  EXPECT_NEAR(p.end().p, -1.5, 1e-9);
  EXPECT_NEAR(p.duration(), double_s_time(3.5, 1.0, 1.5, 3.0), 1e-6);
}

TEST(FastestProfile, MovingStartReachesGoal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(-4, 4), v(-0.95, 0.95), a(-1.4, 1.4);
  const AxisLimits lim{1.0, 1.5, 3.0};
  for (int i = 0; i < 500; ++i) {
    const AxisSample s{0.0, v(rng), a(rng)};
    const double goal = p(rng);
    const AxisProfile prof = fastest_profile(s, goal, 0.0, lim);
    const AxisSample e = prof.end();
    EXPECT_NEAR(e.p, goal, 1e-6);
    EXPECT_NEAR(e.v, 0.0, 1e-7);
    EXPECT_NEAR(e.a, 0.0, 1e-7);
    for (const auto& seg : prof.segments) EXPECT_LE(std::abs(seg.jerk), lim.j_max + 1e-12);
  }
}

TEST(ProfileWithDuration, StretchesToRequestedTime) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3, 3), stretch(1.0, 3.0);
  const AxisLimits lim{1.0, 1.5, 3.0};
  int solved = 0;
  for (int i = 0; i < 300; ++i) {
    const double goal = d(rng);
    const AxisProfile fast = fastest_profile({0, 0, 0}, goal, 0.0, lim);
    const double T = fast.duration() * stretch(rng) + 0.01;
    const auto p = profile_with_duration({0, 0, 0}, goal, 0.0, lim, T);
    if (!p) continue;
    ++solved;
    EXPECT_NEAR(p->duration(), T, 1e-9);
    EXPECT_NEAR(p->end().p, goal, 1e-6);
    EXPECT_NEAR(p->end().v, 0.0, 1e-7);
    expect_within(*p, lim, 1e-7);
  }
  EXPECT_GT(solved, 280);
}
