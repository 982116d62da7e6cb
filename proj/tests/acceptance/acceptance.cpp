// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "colreact/edt.hpp"
#include "colreact/estimation.hpp"
#include "colreact/mission.hpp"
#include "colreact/physics.hpp"
#include "colreact/scenario.hpp"
#include "colreact/sensors.hpp"
#include "colreact/voxel_map.hpp"

using namespace colreact;
namespace fs = std::filesystem;

namespace {

std::map<int, std::pair<bool, std::string>> results;

void report(int id, bool ok, const std::string& detail) { results[id] = {ok, detail}; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

void three_doors() {
  Scenario off_sc = three_door_scenario();
  off_sc.sim.framework_enabled = false;
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport on = run_mission(three_door_scenario());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const RunReport off = run_mission(off_sc);

  bool off_at_glass = off.outcome == "crashed" && !off.trajectory.empty() &&
                      std::abs(off.trajectory.back().truth.position.y() - (-3.0)) < 0.5;
  const bool c1 = on.success && on.final_position_error <= 0.3 && on.collisions.size() == 2 &&
                  off_at_glass && wall < 60.0;
  report(1, c1,
         fmt::format("on: {} final error {:.3f} m, {} collision events, {:.1f} s wall; off: {} at "
                     "y = {:.2f}",
                     on.outcome, on.final_position_error, on.collisions.size(), wall, off.outcome,
                     off.trajectory.empty() ? 0.0 : off.trajectory.back().truth.position.y()));

  const double need = 0.46 - 0.23 - 0.05;
  bool c2 = !on.collisions.empty();
  std::string seps;
  for (const auto& c : on.collisions) {
    c2 = c2 && c.separation >= need;
    seps += fmt::format(" {:.3f}", c.separation);
  }
  report(2, c2, fmt::format("separation after recovery [m]:{} (need >= {:.2f})", seps, need));

  bool c3 = !on.collisions.empty();
  std::string settle;
  for (const auto& c : on.collisions) {
    c3 = c3 && c.settle_time >= 0.0 && c.settle_time <= 1.0;
    settle += fmt::format(" {:.3f}", c.settle_time);
  }
  report(3, c3, fmt::format("event-to-settled time [s]:{} (need <= 1.0)", settle));

  bool c7 = false;
  int post = 0;
  double worst = 1e9;
  bool monotone = true;
  for (const auto& rp : on.replans) {
    if (rp.kind != "post_collision") continue;
    ++post;
    c7 = true;
    for (std::size_t k = 1; k < rp.cost_history.size(); ++k)
      monotone = monotone && rp.cost_history[k] <= rp.cost_history[k - 1];
    worst = std::min(worst, rp.success ? rp.min_clearance : -1.0);
  }
  c7 = c7 && monotone && worst >= 0.35;
  report(7, c7,
         fmt::format("{} post-collision replans, cost non-increasing: {}, min clearance {:.3f} m",
                     post, monotone ? "yes" : "no", worst));
}

void estimation_accuracy() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> mag(15.0, 40.0), yaw(-M_PI, M_PI);
  const CageModel cage;
  const double g = 9.81;
  std::vector<double> angles;
  double worst_intensity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 c_world = random_unit(rng);
    const double m = mag(rng);
    const Rotation world_to_body = Rotation::yaw(yaw(rng)).inverse();
    // The contact pushes the cage away from the contact point.
    const ImuSample s =
        synthesize_imu(0.0, Vec3::Zero(), -m * c_world, world_to_body, g, 0.3, rng);
    const CollisionEvent e = estimate_from_sample(s, g, cage);
    const Vec3 c_body = world_to_body.apply(c_world);
    angles.push_back(std::acos(std::clamp(e.direction.dot(c_body), -1.0, 1.0)) * 180.0 / M_PI);
    worst_intensity = std::max(worst_intensity, std::abs(e.intensity_c - m) / m);
  }
  std::sort(angles.begin(), angles.end());
  const double median = 0.5 * (angles[99] + angles[100]);
  const double mx = angles.back();
  report(4, median <= 3.0 && mx <= 8.0 && worst_intensity <= 0.05,
         fmt::format("200 impacts: median angle {:.2f} deg, max {:.2f} deg, max intensity error "
                     "{:.2f} %",
                     median, mx, 100.0 * worst_intensity));
}

void edt_oracle() {
  std::mt19937_64 rng(99);
  std::bernoulli_distribution occ(0.10);
  const int n = 16;
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    MapConfig cfg;
    cfg.dims = {n, n, n};
    cfg.max_distance = 100.0;
    VoxelMap map(cfg);
    std::vector<VoxelIndex> occupied;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (occ(rng)) {
            const VoxelIndex v{i, j, k};
            occupied.push_back(v);
            Obb b;
            b.center = map.center(v);
            b.half_extents = Vec3::Constant(0.01);
            map.register_collision(b);
          }
    map.compute_edt();
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          std::int64_t best = kEdtInfinity;
          for (const auto& o : occupied) {
            const std::int64_t dx = i - o[0], dy = j - o[1], dz = k - o[2];
            best = std::min(best, dx * dx + dy * dy + dz * dz);
          }
          if (map.squared_voxel_distance({i, j, k}) != best) ++mismatches;
        }
  }
  report(5, mismatches == 0,
         fmt::format("50 random 16^3 grids at 10% occupancy: {} mismatching voxels", mismatches));
}

void collision_priority() {
  MapConfig cfg;
  cfg.origin = Vec3(-3, -3, 0);
  cfg.dims = {60, 60, 30};
  VoxelMap map(cfg);
  Obb box;
  box.center = Vec3(0.0, 0.0, 1.5);
  box.half_extents = Vec3(0.4, 0.12, 0.4);
  box.orientation = Rotation::yaw(0.4);
  map.register_collision(box);
  std::vector<VoxelIndex> inside;
  for (std::size_t i = 0; i < map.voxel_count(); ++i) {
    const VoxelIndex v = map.unlinear(i);
    if (box.contains(map.center(v))) inside.push_back(v);
  }
  // Walls far away give returns whose rays sweep through the box.
  std::vector<Obstacle> walls(2);
  walls[0].center = Vec3(0, 2.8, 1.5);
  walls[0].half_extents = Vec3(3, 0.05, 1.5);
  walls[1].center = Vec3(0, -2.8, 1.5);
  walls[1].half_extents = Vec3(3, 0.05, 1.5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> x(-1.5, 1.5), z(0.8, 2.2), side(0.0, 1.0);
  ScanPattern pattern;
  pattern.v_fov_deg = 60.0;
  std::size_t lost = 0;
  for (int s = 0; s < 1000; ++s) {
    const double y = side(rng) < 0.5 ? -1.5 : 1.5;
    const Pose pose = Pose::at(Vec3(x(rng), y, z(rng)));
    const ScanResult r = simulate_scan(pose, walls, pattern);
    map.integrate_scan(pose, r.hits, pattern.max_range, r.no_return_endpoints);
    for (const auto& v : inside)
      if (map.state(v) != VoxelState::Occupied) ++lost;
  }
  report(6, !inside.empty() && lost == 0,
         fmt::format("{} OBB voxels, 1000 clearing scans: {} voxel states lost", inside.size(),
                     lost));
}

void determinism() {
  const fs::path base = fs::temp_directory_path() / "colreact_acceptance_determinism";
  fs::remove_all(base);
  const std::string scenario = std::string(COLREACT_SCENARIO_DIR) + "/three_doors.yaml";
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = fmt::format("\"{}\" run --scenario \"{}\" --out \"{}\" --seed 7 > /dev/null",
                                        COLREACT_CLI, scenario, (base / run).string());
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  bool same = false;
  std::size_t bytes = 0;
  if (ok) {
    const std::string ta = slurp(base / "a" / "trajectory.csv");
    const std::string ea = slurp(base / "a" / "events.jsonl");
    same = !ta.empty() && !ea.empty() && ta == slurp(base / "b" / "trajectory.csv") &&
           ea == slurp(base / "b" / "events.jsonl");
    bytes = ta.size() + ea.size();
  }
  fs::remove_all(base);
  report(8, ok && same,
         fmt::format("two CLI runs (seed 7): runs ok: {}, trajectory and event logs identical: {} "
                     "({} bytes)",
                     ok ? "yes" : "no", same ? "yes" : "no", bytes));
}

void stick_reaction() {
  const RunReport r = run_mission(stick_impulse_scenario());
  if (r.collisions.size() != 1) {
    report(9, false, fmt::format("expected one collision event, got {}", r.collisions.size()));
    return;
  }
  const CollisionRecord& c = r.collisions[0];
  const Vec3 off = c.recovery.offset_body;
  const double planar = std::hypot(off.x(), off.y());
  double settled_err = 1e9;
  for (const auto& row : r.trajectory)
    if (c.settle_t >= 0.0 && row.t >= c.settle_t) {
      settled_err = (row.truth.position - c.recovery.setpoint_world).norm();
      break;
    }
  const bool ok = c.event.direction.z() < 0.0 && off.z() > 0.0 && std::abs(planar - 0.46) <= 0.05 &&
                  settled_err <= 0.05;
  report(9, ok,
         fmt::format("C_z {:.3f}, offset z {:+.3f} m, planar {:.3f} m, settled position error "
                     "{:.3f} m",
                     c.event.direction.z(), off.z(), planar, settled_err));
}

}  // namespace

int main() {
  three_doors();  // criteria 1, 2, 3, 7
  estimation_accuracy();
  edt_oracle();
  collision_priority();
  determinism();
  stick_reaction();
  int failures = 0;
  for (const auto& [id, r] : results) {
    fmt::print("{} {}: {}\n", r.first ? "PASS" : "FAIL", id, r.second);
    failures += r.first ? 0 : 1;
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
