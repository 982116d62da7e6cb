#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colreact/detection.hpp"
#include "colreact/physics.hpp"
#include "colreact/planner.hpp"
#include "colreact/recovery.hpp"
#include "colreact/sensors.hpp"
#include "colreact/voxel_map.hpp"

namespace colreact {

/// External push applied over a single physics step (e.g. a hit by a moving
/// object the vehicle cannot see).
struct ScriptedImpulse {
  double t = 0.0;
  Vec3 direction = Vec3::UnitX();  // world frame, direction of the velocity change
  double delta_v = 0.5;            // m/s
};

struct DroneConfig {
  double cage_radius = 0.23;
  double mass = 1.45;
};

struct CloudConfig {
  double radius_margin = 0.10;   // disc radius = cage radius + margin
  double step = 0.05;
  double thickness_floor = 0.1;  // minimum OBB half-extent
};

struct SimConfig {
  double dt = 0.0025;
  double imu_rate = 200.0;
  double scan_rate = 10.0;
  double accel_noise_sigma = 0.3;
  std::uint64_t seed = 1;
  bool framework_enabled = true;
  double restitution = 0.3;
  double max_time = 120.0;
  double min_duration = 0.0;     // keep hovering at the last waypoint at least this long
  double takeoff_time = 0.5;
  double waypoint_tolerance = 0.3;
  int crash_contacts = 5;
  double crash_window = 2.0;
  double settle_position_tol = 0.05;
  double settle_speed_tol = 0.1;
};

struct Scenario {
  std::string name = "scenario";
  Vec3 start{0.0, 0.0, 1.0};
  std::vector<Vec3> waypoints;
  std::vector<Obstacle> obstacles;
  std::vector<ScriptedImpulse> impulses;
  DroneConfig drone;
  DetectorConfig detector;
  RecoveryConfig recovery;
  double hold_time = 5.0;          // post-collision hold before replanning
  ControllerGains controller;
  CloudConfig cloud;
  MapConfig map;
  bool map_auto = true;            // size the map from the scene bounding box
  double map_padding = 1.5;
  PlannerConfig planner;
  double replan_period = 0.5;
  ScanPattern sensor;
  SimConfig sim;

  /// Propagates shared values (cage radius), sizes the map when map_auto is
  /// set and validates every section. Throws ConfigError.
  void finalize();
};

/// Parses YAML scenario text. Unknown keys and type errors are reported as
/// ConfigError carrying the 1-based line. Calls finalize().
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Doors at y = -3 and y = -8 carry a glass pane the range sensor cannot
/// see; the door at y = -13 is an open frame. Waypoints at y = -5, -10, -15.
Scenario three_door_scenario();

/// Empty room, flight from (0, 0, 1.5) to (4, 0, 1.5); an unseen object hits
/// the cage from the lower left side at t = 2.5 s.
Scenario stick_impulse_scenario();

std::string to_yaml(const Scenario& sc);

}  // namespace colreact
