#include "colreact/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "colreact/errors.hpp"
#include "colreact/mission.hpp"
#include "colreact/run_log.hpp"
#include "colreact/scenario.hpp"

namespace colreact {

namespace fs = std::filesystem;

namespace {

std::optional<Scenario> load_or_report(const std::string& path) {
  try {
    return load_scenario(path);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}: {}\n", path, e.what());
  }
  return std::nullopt;
}

void print_summary(const RunReport& r, const fs::path& dir) {
  fmt::print("{}: {} (mode {}), collisions {}, contacts {}, sim time {} s, final error {} m\n",
             r.scenario, r.outcome, to_string(r.final_mode), r.collisions.size(),
             r.contact_count, fixed(r.sim_time, 3), fixed(r.final_position_error, 3));
  fmt::print("artifacts in {}\n", dir.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(fmt::format("missing artifact '{}'", p.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void export_table(const fs::path& run, const fs::path& out) {
  const RunArtifacts a = artifact_paths(run);
  const auto rows = lines_of(read_file(a.trajectory));
  const auto events = lines_of(read_file(a.events));
  if (rows.empty() || events.empty()) throw Error("empty run artifacts");

  double a_star = 10.0, g = 9.81;
  const auto start = nlohmann::json::parse(events.front());
  if (start.value("type", "") == "start") {
    a_star = start.value("a_star", a_star);
    g = start.value("g", g);
  }

  std::string table = "t,x,y,z,vx,vy,vz,ax,ay,az,mode\n";
  std::string accel = "t,ax,ay,az,norm,threshold,exceeds\n";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = split(rows[i], ',');
    if (f.size() < 15) throw Error(fmt::format("malformed trajectory row {}", i + 1));
    for (int c = 0; c < 11; ++c) table += f[c] + (c == 10 ? "\n" : ",");
    const double ax = std::stod(f[11]), ay = std::stod(f[12]), az = std::stod(f[13]) - g;
    const bool exceeds = std::abs(ax) > a_star || std::abs(ay) > a_star || std::abs(az) > a_star;
    accel += fmt::format("{},{},{},{},{},{},{}\n", f[0], fixed(ax), fixed(ay), fixed(az), f[14],
                         fixed(a_star), exceeds ? 1 : 0);
  }
  write_atomic(out / "trajectory_table.csv", table);
  write_atomic(out / "accel_threshold.csv", accel);
}

void export_pointcloud(const fs::path& run, const fs::path& out) {
  const auto rows = lines_of(read_file(artifact_paths(run).map));
  std::string cloud = "x,y,z,source\n";
  for (const auto& r : rows) {
    if (r.front() == '#' || r.rfind("i,", 0) == 0) continue;
    const auto f = split(r, ',');
    if (f.size() < 8) throw Error("malformed map row");
    cloud += fmt::format("{},{},{},{}\n", f[3], f[4], f[5], f[7] == "1" ? "collision" : "scan");
  }
  write_atomic(out / "occupied_points.csv", cloud);
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
  auto sc = load_or_report(scenario_path);
  if (!sc) return kExitConfig;
  if (seed_override) sc->sim.seed = *seed_override;
  try {
    const RunReport r = run_mission(*sc);
    write_artifacts(r, out_dir);
    print_summary(r, out_dir);
    return r.success ? kExitSuccess : kExitMission;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitMission;
  }
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir) {
  auto sc = load_or_report(scenario_path);
  if (!sc) return kExitConfig;
  try {
    Scenario on = *sc, off = *sc;
    on.sim.framework_enabled = true;
    off.sim.framework_enabled = false;
    const RunReport ron = run_mission(on);
    const RunReport roff = run_mission(off);
    const fs::path dir(out_dir);
    write_artifacts(ron, dir / "on");
    write_artifacts(roff, dir / "off");

    nlohmann::ordered_json j;
    j["scenario"] = sc->name;
    j["seed"] = sc->sim.seed;
    std::string text = fmt::format("{:<22}{:>14}{:>14}\n", "", "framework on", "framework off");
    auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
      text += fmt::format("{:<22}{:>14}{:>14}\n", name, a, b);
    };
    for (const auto* r : {&ron, &roff}) {
      nlohmann::ordered_json e;
      e["success"] = r->success;
      e["outcome"] = r->outcome;
      e["collisions"] = r->collisions.size();
      e["contacts"] = r->contact_count;
      e["path_length"] = std::stod(fixed(r->path_length));
      e["completion_time"] = std::stod(fixed(r->completion_time));
      e["sim_time"] = std::stod(fixed(r->sim_time));
      j[r == &ron ? "on" : "off"] = e;
    }
    row("outcome", ron.outcome, roff.outcome);
    row("collisions", std::to_string(ron.collisions.size()), std::to_string(roff.collisions.size()));
    row("contacts", std::to_string(ron.contact_count), std::to_string(roff.contact_count));
    row("path length [m]", fixed(ron.path_length, 3), fixed(roff.path_length, 3));
    row("completion time [s]", fixed(ron.completion_time, 3), fixed(roff.completion_time, 3));
    row("sim time [s]", fixed(ron.sim_time, 3), fixed(roff.sim_time, 3));
    write_atomic(dir / "compare.json", j.dump(2) + "\n");
    write_atomic(dir / "compare.txt", text);
    fmt::print("{}", text);
    return kExitSuccess;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitMission;
  }
}

int cmd_export(const std::string& run_dir, const std::string& format) {
  if (format != "table" && format != "pointcloud" && format != "all") {
    fmt::print(stderr, "error: unknown export format '{}'\n", format);
    return kExitConfig;
  }
  const fs::path run(run_dir);
  const fs::path out = run / "export";
  try {
    const RunArtifacts a = artifact_paths(run);
    for (const auto& p : {a.trajectory, a.events, a.map}) {
      if (!fs::exists(p)) throw Error(fmt::format("missing artifact '{}'", p.string()));
    }
    fs::create_directories(out);
    if (format == "table" || format == "all") export_table(run, out);
    if (format == "pointcloud" || format == "all") export_pointcloud(run, out);
    fmt::print("exported to {}\n", out.string());
    return kExitSuccess;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
}

}  // namespace colreact
