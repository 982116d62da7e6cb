#include "colreact/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "colreact/errors.hpp"

namespace colreact {

namespace {

using Handler = std::function<void(const YAML::Node&)>;

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  throw ConfigError(fmt::format("line {}: {}", line_of(n), msg), line_of(n));
}

void read_section(const YAML::Node& node, const std::string& path,
                  const std::map<std::string, Handler>& handlers) {
  if (!node.IsMap()) fail(node, fmt::format("'{}' must be a mapping", path));
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = path.empty() ? key : path + "." + key;
    const auto h = handlers.find(key);
    if (h == handlers.end()) fail(kv.first, fmt::format("unknown key '{}'", full));
    try {
      h->second(kv.second);
    } catch (const YAML::Exception&) {
      fail(kv.second, fmt::format("invalid value for '{}'", full));
    }
  }
}

double as_double(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected a number");
  const double v = n.as<double>();
  if (!std::isfinite(v)) fail(n, "expected a finite number");
  return v;
}

int as_int(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected an integer");
  return n.as<int>();
}

bool as_bool(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected true or false");
  return n.as<bool>();
}

Vec3 as_vec3(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 3) fail(n, "expected a list of three numbers");
  return Vec3(as_double(n[0]), as_double(n[1]), as_double(n[2]));
}

Handler set(double& dst) { return [&dst](const YAML::Node& n) { dst = as_double(n); }; }
Handler set(int& dst) { return [&dst](const YAML::Node& n) { dst = as_int(n); }; }
Handler set(bool& dst) { return [&dst](const YAML::Node& n) { dst = as_bool(n); }; }
Handler set(Vec3& dst) { return [&dst](const YAML::Node& n) { dst = as_vec3(n); }; }

Obstacle read_obstacle(const YAML::Node& n) {
  Obstacle o;
  bool has_center = false, has_extents = false;
  read_section(n, "obstacles[]",
               {{"center", [&](const YAML::Node& v) { o.center = as_vec3(v); has_center = true; }},
                {"half_extents",
                 [&](const YAML::Node& v) { o.half_extents = as_vec3(v); has_extents = true; }},
                {"transparent", set(o.transparent)},
                {"name", [&](const YAML::Node& v) { o.name = v.as<std::string>(); }}});
  if (!has_center) fail(n, "obstacle is missing key 'center'");
  if (!has_extents) fail(n, "obstacle is missing key 'half_extents'");
  if ((o.half_extents.array() <= 0.0).any()) fail(n, "obstacle half_extents must be > 0");
  return o;
}

ScriptedImpulse read_impulse(const YAML::Node& n) {
  ScriptedImpulse im;
  read_section(n, "impulses[]",
               {{"time", set(im.t)}, {"direction", set(im.direction)}, {"delta_v", set(im.delta_v)}});
  if (im.direction.norm() == 0.0) fail(n, "impulse direction must be nonzero");
  im.direction.normalize();
  return im;
}

}  // namespace

void Scenario::finalize() {
  if (waypoints.empty()) throw ConfigError("scenario needs at least one entry in 'waypoints'");
  if (!(drone.cage_radius > 0.0)) throw ConfigError("drone.cage_radius must be > 0");
  recovery.cage_radius = drone.cage_radius;
  planner.cage_radius = drone.cage_radius;
  if (map_auto) {
    Vec3 lo = start, hi = start;
    for (const auto& w : waypoints) {
      lo = lo.cwiseMin(w);
      hi = hi.cwiseMax(w);
    }
    for (const auto& o : obstacles) {
      lo = lo.cwiseMin(o.min_corner());
      hi = hi.cwiseMax(o.max_corner());
    }
    lo.array() -= map_padding;
    hi.array() += map_padding;
    const double res = map.resolution;
    if (!(res > 0.0)) throw ConfigError("map.resolution must be > 0");
    for (int a = 0; a < 3; ++a) {
      map.origin[a] = std::floor(lo[a] / res) * res;
      map.dims[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - map.origin[a]) / res - 1e-9)));
    }
  }
  detector.validate();
  recovery.validate();
  map.validate();
  planner.validate();
  sensor.validate();
  if (!(hold_time >= 0.0)) throw ConfigError("recovery.hold_time must be >= 0");
  if (!(replan_period > 0.0)) throw ConfigError("planner.replan_period must be > 0");
  if (!(controller.kp > 0.0 && controller.kd >= 0.0 && controller.a_max > 0.0))
    throw ConfigError("controller gains must be positive");
  if (!(cloud.step > 0.0 && cloud.radius_margin >= 0.0 && cloud.thickness_floor > 0.0))
    throw ConfigError("cloud parameters must be positive");
  if (!(sim.dt > 0.0 && sim.imu_rate > 0.0 && sim.scan_rate > 0.0))
    throw ConfigError("sim rates must be positive");
  if (!(sim.accel_noise_sigma >= 0.0)) throw ConfigError("sim.accel_noise_sigma must be >= 0");
  if (!(sim.restitution >= 0.0 && sim.restitution <= 1.0))
    throw ConfigError("sim.restitution must lie in [0, 1]");
  if (sim.crash_contacts < 1) throw ConfigError("sim.crash_contacts must be >= 1");
  const double ratio = 1.0 / (sim.imu_rate * sim.dt);
  if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1.0)
    throw ConfigError("sim.imu_rate must divide the physics rate");
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    const int line = e.mark.line >= 0 ? e.mark.line + 1 : 0;
    throw ConfigError(fmt::format("line {}: {}", line, e.msg), line);
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a YAML mapping", 1);

  Scenario sc;
  bool has_waypoints = false;
  bool explicit_map = false;
  read_section(
      root, "",
      {{"name", [&](const YAML::Node& n) { sc.name = n.as<std::string>(); }},
       {"start", set(sc.start)},
       {"waypoints",
        [&](const YAML::Node& n) {
          if (!n.IsSequence()) fail(n, "'waypoints' must be a list");
          for (const auto& w : n) sc.waypoints.push_back(as_vec3(w));
          has_waypoints = true;
        }},
       {"obstacles",
        [&](const YAML::Node& n) {
          if (!n.IsSequence()) fail(n, "'obstacles' must be a list");
          for (const auto& o : n) sc.obstacles.push_back(read_obstacle(o));
        }},
       {"impulses",
        [&](const YAML::Node& n) {
          if (!n.IsSequence()) fail(n, "'impulses' must be a list");
          for (const auto& i : n) sc.impulses.push_back(read_impulse(i));
        }},
       {"drone",
        [&](const YAML::Node& n) {
          read_section(n, "drone",
                       {{"cage_radius", set(sc.drone.cage_radius)}, {"mass", set(sc.drone.mass)}});
        }},
       {"detector",
        [&](const YAML::Node& n) {
          read_section(n, "detector",
                       {{"a_star", set(sc.detector.a_star)},
                        {"window_n", set(sc.detector.window_n)},
                        {"g", set(sc.detector.g)},
                        {"cooldown", set(sc.detector.cooldown)}});
        }},
       {"recovery",
        [&](const YAML::Node& n) {
          read_section(n, "recovery",
                       {{"d_star", set(sc.recovery.d_star)},
                        {"reaction_distance", set(sc.recovery.reaction_distance)},
                        {"hold_time", set(sc.hold_time)}});
        }},
       {"controller",
        [&](const YAML::Node& n) {
          read_section(n, "controller",
                       {{"kp", set(sc.controller.kp)},
                        {"kd", set(sc.controller.kd)},
                        {"a_max", set(sc.controller.a_max)}});
        }},
       {"cloud",
        [&](const YAML::Node& n) {
          read_section(n, "cloud",
                       {{"radius_margin", set(sc.cloud.radius_margin)},
                        {"step", set(sc.cloud.step)},
                        {"thickness_floor", set(sc.cloud.thickness_floor)}});
        }},
       {"map",
        [&](const YAML::Node& n) {
          read_section(
              n, "map",
              {{"resolution", set(sc.map.resolution)},
               {"padding", set(sc.map_padding)},
               {"origin", [&](const YAML::Node& v) { sc.map.origin = as_vec3(v); explicit_map = true; }},
               {"dims",
                [&](const YAML::Node& v) {
                  const Vec3 d = as_vec3(v);
                  for (int a = 0; a < 3; ++a) sc.map.dims[a] = static_cast<int>(d[a]);
                  explicit_map = true;
                }},
               {"occupancy_hit", set(sc.map.occupancy_hit)},
               {"occupancy_miss", set(sc.map.occupancy_miss)},
               {"occupied_threshold", set(sc.map.occupied_threshold)},
               {"local_window", set(sc.map.local_window)},
               {"max_distance", set(sc.map.max_distance)}});
        }},
       {"planner",
        [&](const YAML::Node& n) {
          read_section(n, "planner",
                       {{"w1", set(sc.planner.w1)},
                        {"w2", set(sc.planner.w2)},
                        {"horizon_t", set(sc.planner.horizon_t)},
                        {"steps", set(sc.planner.steps)},
                        {"j_max", set(sc.planner.j_max)},
                        {"a_max", set(sc.planner.a_max)},
                        {"v_max", set(sc.planner.v_max)},
                        {"safety_distance", set(sc.planner.safety_distance)},
                        {"max_iterations", set(sc.planner.max_iterations)},
                        {"guide_margin", set(sc.planner.guide_margin)},
                        {"goal_relax_radius", set(sc.planner.goal_relax_radius)},
                        {"replan_period", set(sc.replan_period)}});
        }},
       {"sensor",
        [&](const YAML::Node& n) {
          read_section(n, "sensor",
                       {{"h_fov_deg", set(sc.sensor.h_fov_deg)},
                        {"v_fov_deg", set(sc.sensor.v_fov_deg)},
                        {"h_res_deg", set(sc.sensor.h_res_deg)},
                        {"channels", set(sc.sensor.channels)},
                        {"max_range", set(sc.sensor.max_range)}});
        }},
       {"sim",
        [&](const YAML::Node& n) {
          read_section(
              n, "sim",
              {{"dt", set(sc.sim.dt)},
               {"imu_rate", set(sc.sim.imu_rate)},
               {"scan_rate", set(sc.sim.scan_rate)},
               {"accel_noise_sigma", set(sc.sim.accel_noise_sigma)},
               {"seed", [&](const YAML::Node& v) { sc.sim.seed = v.as<std::uint64_t>(); }},
               {"framework_enabled", set(sc.sim.framework_enabled)},
               {"restitution", set(sc.sim.restitution)},
               {"max_time", set(sc.sim.max_time)},
               {"min_duration", set(sc.sim.min_duration)},
               {"takeoff_time", set(sc.sim.takeoff_time)},
               {"waypoint_tolerance", set(sc.sim.waypoint_tolerance)},
               {"crash_contacts", set(sc.sim.crash_contacts)},
               {"crash_window", set(sc.sim.crash_window)}});
        }}});

  if (!has_waypoints) throw ConfigError("missing required key 'waypoints'", 1);
  if (sc.waypoints.empty()) throw ConfigError("'waypoints' must not be empty", 1);
  sc.map_auto = !explicit_map;
  sc.finalize();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()), e.line());
  }
}

namespace {

void add_door(Scenario& sc, const std::string& name, double y, bool glass) {
  // Free-standing frame: two posts and a lintel around a 3 m wide opening.
  sc.obstacles.push_back({Vec3(-1.75, y, 1.2), Vec3(0.25, 0.05, 1.2), false, name + "_left"});
  sc.obstacles.push_back({Vec3(1.75, y, 1.2), Vec3(0.25, 0.05, 1.2), false, name + "_right"});
  sc.obstacles.push_back({Vec3(0.0, y, 2.55), Vec3(2.0, 0.05, 0.15), false, name + "_lintel"});
  if (glass) {
    sc.obstacles.push_back({Vec3(0.0, y, 1.0), Vec3(0.25, 0.004, 0.25), true, name + "_glass"});
  }
}

}  // namespace

Scenario three_door_scenario() {
  Scenario sc;
  sc.name = "three_doors";
  sc.start = Vec3(0.0, 0.0, 1.0);
  sc.waypoints = {Vec3(0.0, -5.0, 1.0), Vec3(0.0, -10.0, 1.0), Vec3(0.0, -15.0, 1.0)};
  add_door(sc, "door1", -3.0, true);
  add_door(sc, "door2", -8.0, true);
  add_door(sc, "door3", -13.0, false);
  sc.obstacles.push_back({Vec3(0.0, -7.5, -0.05), Vec3(3.0, 8.5, 0.05), false, "floor"});
  sc.sim.seed = 7;
  sc.map_padding = 1.0;
  sc.finalize();
  return sc;
}

Scenario stick_impulse_scenario() {
  Scenario sc;
  sc.name = "stick_impulse";
  sc.start = Vec3(0.0, 0.0, 1.5);
  sc.waypoints = {Vec3(4.0, 0.0, 1.5)};
  // Contact on the lower left of the cage: 15 degrees below the +y (left) axis.
  const Vec3 contact_dir(0.0, std::cos(deg_to_rad(15.0)), -std::sin(deg_to_rad(15.0)));
  sc.impulses.push_back({2.5, -contact_dir, 0.5});
  sc.sim.seed = 11;
  sc.map_padding = 1.5;
  sc.finalize();
  return sc;
}

std::string to_yaml(const Scenario& sc) {
  YAML::Emitter e;
  e.SetDoublePrecision(10);
  auto vec = [&](const Vec3& v) {
    e << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
  };
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << sc.name;
  e << YAML::Key << "start" << YAML::Value;
  vec(sc.start);
  e << YAML::Key << "waypoints" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : sc.waypoints) vec(w);
  e << YAML::EndSeq;
  if (!sc.obstacles.empty()) {
    e << YAML::Key << "obstacles" << YAML::Value << YAML::BeginSeq;
    for (const auto& o : sc.obstacles) {
      e << YAML::Flow << YAML::BeginMap;
      if (!o.name.empty()) e << YAML::Key << "name" << YAML::Value << o.name;
      e << YAML::Key << "center" << YAML::Value;
      vec(o.center);
      e << YAML::Key << "half_extents" << YAML::Value;
      vec(o.half_extents);
      e << YAML::Key << "transparent" << YAML::Value << o.transparent;
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  if (!sc.impulses.empty()) {
    e << YAML::Key << "impulses" << YAML::Value << YAML::BeginSeq;
    for (const auto& im : sc.impulses) {
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "time" << YAML::Value << im.t;
      e << YAML::Key << "direction" << YAML::Value;
      vec(im.direction);
      e << YAML::Key << "delta_v" << YAML::Value << im.delta_v << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  auto kv = [&](const char* k, auto v) { e << YAML::Key << k << YAML::Value << v; };
  e << YAML::Key << "drone" << YAML::Value << YAML::BeginMap;
  kv("cage_radius", sc.drone.cage_radius);
  kv("mass", sc.drone.mass);
  e << YAML::EndMap;
  e << YAML::Key << "detector" << YAML::Value << YAML::BeginMap;
  kv("a_star", sc.detector.a_star);
  kv("window_n", sc.detector.window_n);
  kv("g", sc.detector.g);
  kv("cooldown", sc.detector.cooldown);
  e << YAML::EndMap;
  e << YAML::Key << "recovery" << YAML::Value << YAML::BeginMap;
  kv("d_star", sc.recovery.d_star);
  kv("reaction_distance", sc.recovery.reaction_distance);
  kv("hold_time", sc.hold_time);
  e << YAML::EndMap;
  e << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  kv("kp", sc.controller.kp);
  kv("kd", sc.controller.kd);
  kv("a_max", sc.controller.a_max);
  e << YAML::EndMap;
  e << YAML::Key << "cloud" << YAML::Value << YAML::BeginMap;
  kv("radius_margin", sc.cloud.radius_margin);
  kv("step", sc.cloud.step);
  kv("thickness_floor", sc.cloud.thickness_floor);
  e << YAML::EndMap;
  e << YAML::Key << "map" << YAML::Value << YAML::BeginMap;
  kv("resolution", sc.map.resolution);
  if (sc.map_auto) {
    kv("padding", sc.map_padding);
  } else {
    e << YAML::Key << "origin" << YAML::Value;
    vec(sc.map.origin);
    e << YAML::Key << "dims" << YAML::Value << YAML::Flow << YAML::BeginSeq << sc.map.dims[0]
      << sc.map.dims[1] << sc.map.dims[2] << YAML::EndSeq;
  }
  kv("occupancy_hit", sc.map.occupancy_hit);
  kv("occupancy_miss", sc.map.occupancy_miss);
  kv("occupied_threshold", sc.map.occupied_threshold);
  kv("local_window", sc.map.local_window);
  kv("max_distance", sc.map.max_distance);
  e << YAML::EndMap;
  e << YAML::Key << "planner" << YAML::Value << YAML::BeginMap;
  kv("w1", sc.planner.w1);
  kv("w2", sc.planner.w2);
  kv("horizon_t", sc.planner.horizon_t);
  kv("steps", sc.planner.steps);
  kv("j_max", sc.planner.j_max);
  kv("a_max", sc.planner.a_max);
  kv("v_max", sc.planner.v_max);
  kv("safety_distance", sc.planner.safety_distance);
  kv("max_iterations", sc.planner.max_iterations);
  kv("guide_margin", sc.planner.guide_margin);
  kv("goal_relax_radius", sc.planner.goal_relax_radius);
  kv("replan_period", sc.replan_period);
  e << YAML::EndMap;
  e << YAML::Key << "sensor" << YAML::Value << YAML::BeginMap;
  kv("h_fov_deg", sc.sensor.h_fov_deg);
  kv("v_fov_deg", sc.sensor.v_fov_deg);
  kv("h_res_deg", sc.sensor.h_res_deg);
  kv("channels", sc.sensor.channels);
  kv("max_range", sc.sensor.max_range);
  e << YAML::EndMap;
  e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  kv("dt", sc.sim.dt);
  kv("imu_rate", sc.sim.imu_rate);
  kv("scan_rate", sc.sim.scan_rate);
  kv("accel_noise_sigma", sc.sim.accel_noise_sigma);
  kv("seed", sc.sim.seed);
  kv("framework_enabled", sc.sim.framework_enabled);
  kv("restitution", sc.sim.restitution);
  kv("max_time", sc.sim.max_time);
  kv("min_duration", sc.sim.min_duration);
  kv("takeoff_time", sc.sim.takeoff_time);
  kv("waypoint_tolerance", sc.sim.waypoint_tolerance);
  kv("crash_contacts", sc.sim.crash_contacts);
  kv("crash_window", sc.sim.crash_window);
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace colreact
