#include <gtest/gtest.h>

#include <string>

#include "colreact/errors.hpp"
#include "colreact/scenario.hpp"

using namespace colreact;

namespace {

const std::string kDir = COLREACT_SCENARIO_DIR;

void expect_same(const Scenario& a, const Scenario& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.start, b.start);
  ASSERT_EQ(a.waypoints.size(), b.waypoints.size());
  for (std::size_t i = 0; i < a.waypoints.size(); ++i)
    EXPECT_LT((a.waypoints[i] - b.waypoints[i]).norm(), 1e-9);
  ASSERT_EQ(a.obstacles.size(), b.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_EQ(a.obstacles[i].name, b.obstacles[i].name);
    EXPECT_LT((a.obstacles[i].center - b.obstacles[i].center).norm(), 1e-9);
    EXPECT_LT((a.obstacles[i].half_extents - b.obstacles[i].half_extents).norm(), 1e-9);
    EXPECT_EQ(a.obstacles[i].transparent, b.obstacles[i].transparent);
  }
  ASSERT_EQ(a.impulses.size(), b.impulses.size());
  for (std::size_t i = 0; i < a.impulses.size(); ++i) {
    EXPECT_NEAR(a.impulses[i].t, b.impulses[i].t, 1e-12);
    EXPECT_LT((a.impulses[i].direction - b.impulses[i].direction).norm(), 1e-9);
    EXPECT_NEAR(a.impulses[i].delta_v, b.impulses[i].delta_v, 1e-12);
  }
  EXPECT_EQ(a.sim.seed, b.sim.seed);
  EXPECT_EQ(a.map.dims, b.map.dims);
  EXPECT_LT((a.map.origin - b.map.origin).norm(), 1e-9);
}

int error_line(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Scenario, ParsesMinimalDocument) {
  const Scenario sc = parse_scenario(
      "name: t\n"
      "start: [1, 2, 1]\n"
      "waypoints:\n"
      "  - [1, 5, 1]\n"
      "obstacles:\n"
      "  - {center: [1, 3.5, 1], half_extents: [1, 0.1, 1], transparent: true}\n"
      "detector: {a_star: 12, window_n: 8}\n"
      "sim: {seed: 99, framework_enabled: false}\n");
  EXPECT_EQ(sc.name, "t");
  EXPECT_EQ(sc.start, Vec3(1, 2, 1));
  ASSERT_EQ(sc.waypoints.size(), 1u);
  ASSERT_EQ(sc.obstacles.size(), 1u);
  EXPECT_TRUE(sc.obstacles[0].transparent);
  EXPECT_DOUBLE_EQ(sc.detector.a_star, 12.0);
  EXPECT_EQ(sc.detector.window_n, 8);
  EXPECT_EQ(sc.sim.seed, 99u);
  EXPECT_FALSE(sc.sim.framework_enabled);
  // Defaults survive.
  EXPECT_DOUBLE_EQ(sc.recovery.d_star, 1.0);
  EXPECT_DOUBLE_EQ(sc.planner.safety_distance, 0.35);
}

TEST(Scenario, AutoMapCoversSceneWithPadding) {
  const Scenario sc = parse_scenario("start: [0, 0, 1]\nwaypoints: [[3, -4, 2]]\n");
  const Vec3 hi = sc.map.origin + sc.map.resolution * Vec3(sc.map.dims[0], sc.map.dims[1],
                                                           sc.map.dims[2]);
  for (const Vec3& p : {Vec3(0, 0, 1), Vec3(3, -4, 2)}) {
    EXPECT_TRUE(((p - sc.map.origin).array() >= sc.map_padding - 1e-9).all());
    EXPECT_TRUE(((hi - p).array() >= sc.map_padding - 1e-9).all());
  }
}

TEST(Scenario, MissingWaypointsNamesKey) {
  try {
    parse_scenario("name: x\nstart: [0, 0, 1]\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("waypoints"), std::string::npos);
  }
}

TEST(Scenario, UnknownKeyReportsLine) {
  const std::string text = "start: [0, 0, 1]\nwaypoints: [[1, 0, 1]]\nsim:\n  seed: 1\n  sped: 2\n";
  EXPECT_EQ(error_line(text), 5);
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sim.sped"), std::string::npos);
  }
}

TEST(Scenario, TypeErrorsReportLine) {
  EXPECT_EQ(error_line("start: [0, 0]\nwaypoints: [[1, 0, 1]]\n"), 1);
  EXPECT_EQ(error_line("waypoints: [[1, 0, 1]]\ndetector:\n  a_star: fast\n"), 3);
  EXPECT_EQ(error_line("waypoints: [[1, 0, 1]]\nobstacles:\n  - {center: [0, 0, 0]}\n"), 3);
  EXPECT_EQ(error_line("waypoints: [[1, 0, 1]]\nsim: {restitution: 2}\n"), 0);
  EXPECT_THROW(parse_scenario("waypoints: [[1, 0, 1]]\nsim: {imu_rate: 150}\n"), ConfigError);
  EXPECT_THROW(parse_scenario("- 1\n- 2\n"), ConfigError);
  EXPECT_THROW(parse_scenario("waypoints: [[1, 0, 1]\n"), ConfigError);
}

TEST(Scenario, BundledFilesLoad) {
  for (const char* f : {"three_doors.yaml", "stick_impulse.yaml", "empty_room.yaml"}) {
    EXPECT_NO_THROW(load_scenario(kDir + "/" + f)) << f;
  }
  EXPECT_THROW(load_scenario(kDir + "/does_not_exist.yaml"), ConfigError);
}

TEST(Scenario, BuildersMatchBundledFiles) {
  expect_same(three_door_scenario(), load_scenario(kDir + "/three_doors.yaml"));
  expect_same(stick_impulse_scenario(), load_scenario(kDir + "/stick_impulse.yaml"));
}

TEST(Scenario, ThreeDoorLayout) {
  const Scenario sc = three_door_scenario();
  int transparent = 0;
  for (const auto& o : sc.obstacles) transparent += o.transparent ? 1 : 0;
  EXPECT_EQ(transparent, 2);
  ASSERT_EQ(sc.waypoints.size(), 3u);
  EXPECT_DOUBLE_EQ(sc.waypoints[0].y(), -5);
  EXPECT_DOUBLE_EQ(sc.waypoints[1].y(), -10);
  EXPECT_DOUBLE_EQ(sc.waypoints[2].y(), -15);
}

TEST(Scenario, YamlRoundTrip) {
  Scenario sc = three_door_scenario();
  sc.detector.a_star = 11.5;
  sc.planner.w1 = 7.0;
  sc.sim.framework_enabled = false;
  const Scenario back = parse_scenario(to_yaml(sc));
  expect_same(sc, back);
  EXPECT_DOUBLE_EQ(back.detector.a_star, 11.5);
  EXPECT_DOUBLE_EQ(back.planner.w1, 7.0);
  EXPECT_FALSE(back.sim.framework_enabled);
  EXPECT_EQ(to_yaml(back), to_yaml(sc));
}
