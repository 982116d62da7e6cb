#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "colreact/collision_cloud.hpp"
#include "colreact/estimation.hpp"
#include "colreact/recovery.hpp"
#include "colreact/scenario.hpp"
#include "colreact/state.hpp"
#include "colreact/voxel_map.hpp"

namespace colreact {

enum class Mode { Takeoff, WaypointTracking, RecoveryHold, Replanning, HoverAbort, Crashed };

const char* to_string(Mode m);
bool legal_transition(Mode from, Mode to);

/// One row per IMU tick.
struct TrajectoryRow {
  double t = 0.0;
  State truth;
  Mode mode = Mode::Takeoff;
  Vec3 imu_accel = Vec3::Zero();  // raw body-frame reading
  double accel_norm = 0.0;        // gravity-compensated norm
};

struct CollisionRecord {
  CollisionEvent event;        // event.t is the peak sample time
  double detected_t = 0.0;     // time the window closed and the reaction was issued
  bool reacted = false;
  RecoveryCommand recovery;
  Obb obb;
  bool registered = false;
  std::size_t obb_voxels = 0;
  double contact_t = -1.0;     // nearest true contact, -1 if none
  int obstacle = -1;           // obstacle index of that contact
  std::string obstacle_name;
  double settle_t = -1.0;      // first settled instant, -1 if never
  double settle_time = -1.0;   // settle_t - event.t
  double separation = -1.0;    // center to contacted surface when the hold ended
};

struct ReplanRecord {
  double t = 0.0;
  std::string kind;            // "periodic" or "post_collision"
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  Vec3 subgoal = Vec3::Zero();
  bool success = false;
  std::string error;
  std::vector<double> cost_history;
  double min_clearance = 0.0;
  bool clearance_ok = false;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  bool framework_enabled = true;
  bool success = false;
  std::string outcome;         // success, crashed, hover_abort, timeout
  Mode final_mode = Mode::Takeoff;
  double sim_time = 0.0;
  double completion_time = -1.0;
  std::size_t waypoints_reached = 0;
  double final_position_error = 0.0;
  double path_length = 0.0;
  std::size_t contact_count = 0;
  std::vector<double> contact_times;
  std::vector<CollisionRecord> collisions;
  std::vector<ReplanRecord> replans;
  std::vector<TrajectoryRow> trajectory;
  std::vector<std::string> events;  // one JSON record per line
  std::shared_ptr<const VoxelMap> map;
  double wall_clock_s = 0.0;
};

/// Runs the scenario to completion (success, crash, abort or max_time).
/// Deterministic for a given scenario and seed.
RunReport run_mission(const Scenario& sc);

}  // namespace colreact
