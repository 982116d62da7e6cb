#include "colreact/run_log.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "colreact/errors.hpp"
#include "colreact/mission.hpp"
#include "colreact/voxel_map.hpp"

namespace colreact {

namespace fs = std::filesystem;

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "0");
  std::string s = fmt::format("{:.{}f}", v, decimals);
  // Avoid "-0.000000" so sign noise below the printed precision cannot differ.
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += fmt::format("\\u{:04x}", static_cast<int>(c));
        } else {
          out += c;
        }
    }
  }
  return out;
}

RecordBuilder::RecordBuilder(const std::string& type, double t) {
  body_ = "{\"type\":\"" + json_escape(type) + "\",\"t\":" + fixed(t);
}

void RecordBuilder::key(const std::string& k) { body_ += ",\"" + json_escape(k) + "\":"; }

RecordBuilder& RecordBuilder::add(const std::string& k, double v) {
  key(k);
  body_ += fixed(v);
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, int v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, std::size_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, const std::string& v) {
  key(k);
  body_ += "\"" + json_escape(v) + "\"";
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, const Vec3& v) {
  key(k);
  body_ += "[" + fixed(v.x()) + "," + fixed(v.y()) + "," + fixed(v.z()) + "]";
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, const std::vector<double>& v) {
  key(k);
  body_ += "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) body_ += ",";
    body_ += fixed(v[i]);
  }
  body_ += "]";
  return *this;
}

RecordBuilder& RecordBuilder::add(const std::string& k, const std::vector<Vec3>& v, int decimals) {
  key(k);
  body_ += "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) body_ += ",";
    body_ += "[" + fixed(v[i].x(), decimals) + "," + fixed(v[i].y(), decimals) + "," +
             fixed(v[i].z(), decimals) + "]";
  }
  body_ += "]";
  return *this;
}

RunArtifacts artifact_paths(const fs::path& dir) {
  return {dir / "trajectory.csv", dir / "events.jsonl", dir / "map.csv", dir / "report.json"};
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const RunReport& r) {
  std::string out = "t,x,y,z,vx,vy,vz,ax,ay,az,mode,imu_ax,imu_ay,imu_az,accel_norm\n";
  for (const auto& row : r.trajectory) {
    const State& s = row.truth;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", fixed(row.t),
                       fixed(s.position.x()), fixed(s.position.y()), fixed(s.position.z()),
                       fixed(s.velocity.x()), fixed(s.velocity.y()), fixed(s.velocity.z()),
                       fixed(s.acceleration.x()), fixed(s.acceleration.y()),
                       fixed(s.acceleration.z()), to_string(row.mode), fixed(row.imu_accel.x()),
                       fixed(row.imu_accel.y()), fixed(row.imu_accel.z()), fixed(row.accel_norm));
  }
  return out;
}

std::string events_jsonl(const RunReport& r) {
  std::string out;
  for (const auto& e : r.events) out += e + "\n";
  return out;
}

std::string map_csv(const VoxelMap& map) {
  const MapConfig& c = map.config();
  std::string out = fmt::format("# resolution={} origin={},{},{} dims={},{},{}\n",
                                fixed(c.resolution), fixed(c.origin.x()), fixed(c.origin.y()),
                                fixed(c.origin.z()), c.dims[0], c.dims[1], c.dims[2]);
  out += "i,j,k,x,y,z,state,collision,logodds,edt\n";
  for (std::size_t idx = 0; idx < map.voxel_count(); ++idx) {
    const VoxelIndex v = map.unlinear(idx);
    const VoxelState st = map.state(v);
    if (st != VoxelState::Occupied) continue;
    const Vec3 p = map.center(v);
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", v[0], v[1], v[2], fixed(p.x(), 4),
                       fixed(p.y(), 4), fixed(p.z(), 4), to_string(st),
                       map.is_collision_voxel(v) ? 1 : 0, fixed(map.logodds(v), 4),
                       fixed(map.edt(v), 4));
  }
  return out;
}

namespace {

// Rounded so the report carries the same precision as the logs.
double num(double v) { return std::isfinite(v) ? std::round(v * 1e6) / 1e6 + 0.0 : v; }

nlohmann::ordered_json vec_json(const Vec3& v) { return {num(v.x()), num(v.y()), num(v.z())}; }

}  // namespace

std::string report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["framework_enabled"] = r.framework_enabled;
  j["success"] = r.success;
  j["outcome"] = r.outcome;
  j["final_mode"] = to_string(r.final_mode);
  j["sim_time"] = num(r.sim_time);
  j["completion_time"] = num(r.completion_time);
  j["waypoints_reached"] = r.waypoints_reached;
  j["final_position_error"] = num(r.final_position_error);
  j["path_length"] = num(r.path_length);
  j["contact_count"] = r.contact_count;
  j["collision_count"] = r.collisions.size();
  auto& cols = j["collisions"] = nlohmann::ordered_json::array();
  for (const auto& c : r.collisions) {
    nlohmann::ordered_json e;
    e["t"] = num(c.event.t);
    e["detected_t"] = num(c.detected_t);
    e["intensity"] = num(c.event.intensity_c);
    e["direction"] = vec_json(c.event.direction);
    e["theta_deg"] = num(rad_to_deg(c.event.theta));
    e["phi_deg"] = num(rad_to_deg(c.event.phi));
    e["point_body"] = vec_json(c.event.point_body);
    e["recovery_setpoint"] = vec_json(c.recovery.setpoint_world);
    e["recovery_offset_body"] = vec_json(c.recovery.offset_body);
    e["recovery_weight"] = num(c.recovery.weight);
    e["obb_center"] = vec_json(c.obb.center);
    e["obb_half_extents"] = vec_json(c.obb.half_extents);
    e["obb_voxels"] = c.obb_voxels;
    e["contact_t"] = num(c.contact_t);
    e["obstacle"] = c.obstacle_name;
    e["settle_time"] = num(c.settle_time);
    e["separation"] = num(c.separation);
    cols.push_back(std::move(e));
  }
  auto& reps = j["replans"] = nlohmann::ordered_json::array();
  for (const auto& p : r.replans) {
    if (p.kind != "post_collision") continue;
    nlohmann::ordered_json e;
    e["t"] = num(p.t);
    e["success"] = p.success;
    e["subgoal"] = vec_json(p.subgoal);
    e["min_clearance"] = num(p.min_clearance);
    e["clearance_ok"] = p.clearance_ok;
    e["cost_history"] = nlohmann::ordered_json::array();
    for (double v : p.cost_history) e["cost_history"].push_back(num(v));
    if (!p.success) e["error"] = p.error;
    reps.push_back(std::move(e));
  }
  j["replan_count"] = r.replans.size();
  j["wall_clock_s"] = num(r.wall_clock_s);
  return j.dump(2) + "\n";
}

RunArtifacts write_artifacts(const RunReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  const RunArtifacts a = artifact_paths(dir);
  write_atomic(a.trajectory, trajectory_csv(r));
  write_atomic(a.events, events_jsonl(r));
  if (r.map) {
    write_atomic(a.map, map_csv(*r.map));
  } else {
    write_atomic(a.map, "");
  }
  write_atomic(a.report, report_json(r));
  return a;
}

}  // namespace colreact
