#include "colreact/sensors.hpp"

#include <cmath>
#include <limits>

#include "colreact/errors.hpp"

namespace colreact {

void ScanPattern::validate() const {
  if (!(h_fov_deg > 0.0 && h_fov_deg <= 360.0)) throw ConfigError("sensor.h_fov_deg out of range");
  if (!(v_fov_deg >= 0.0 && v_fov_deg < 180.0)) throw ConfigError("sensor.v_fov_deg out of range");
  if (!(h_res_deg > 0.0)) throw ConfigError("sensor.h_res_deg must be > 0");
  if (channels < 1) throw ConfigError("sensor.channels must be >= 1");
  if (!(max_range > 0.0)) throw ConfigError("sensor.max_range must be > 0");
}

std::vector<Vec3> ScanPattern::directions_body() const {
  std::vector<Vec3> dirs;
  const bool full_circle = h_fov_deg >= 360.0;
  const int n_az = std::max(1, static_cast<int>(std::round(h_fov_deg / h_res_deg)) +
                                   (full_circle ? 0 : 1));
  for (int c = 0; c < channels; ++c) {
    const double el = channels == 1 ? 0.0
                                    : deg_to_rad(-0.5 * v_fov_deg + v_fov_deg * c / (channels - 1));
    for (int i = 0; i < n_az; ++i) {
      const double az = deg_to_rad(-0.5 * h_fov_deg + h_res_deg * i);
      dirs.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    }
  }
  return dirs;
}

std::optional<double> ray_box_entry(const Vec3& origin, const Vec3& dir, const Obstacle& box,
                                    double max_t) {
  double t0 = 0.0, t1 = max_t;
  const Vec3 lo = box.min_corner(), hi = box.max_corner();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < lo[a] || origin[a] > hi[a]) return std::nullopt;
      continue;
    }
    double ta = (lo[a] - origin[a]) / dir[a];
    double tb = (hi[a] - origin[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

ScanResult simulate_scan(const Pose& pose, std::span<const Obstacle> obstacles,
                         const ScanPattern& pattern) {
  ScanResult out;
  const Vec3 origin = pose.translation;
  for (const Vec3& d_body : pattern.directions_body()) {
    const Vec3 d = pose.rotation.apply(d_body);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& box : obstacles) {
      if (box.transparent) continue;
      if (auto t = ray_box_entry(origin, d, box, pattern.max_range)) best = std::min(best, *t);
    }
    if (best <= pattern.max_range) out.hits.push_back(origin + best * d);
    else out.no_return_endpoints.push_back(origin + pattern.max_range * d);
  }
  return out;
}

ImuSample synthesize_imu(double t, const Vec3& true_accel_world, const Vec3& spike_world,
                         const Rotation& world_to_body, double g, double sigma,
                         std::mt19937_64& rng) {
  ImuSample s;
  s.t = t;
  s.attitude = world_to_body;
  s.accel = rotate_world_to_body(world_to_body, true_accel_world + spike_world + g * kUnitZ);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (int a = 0; a < 3; ++a) s.accel[a] += noise(rng);
  }
  return s;
}

}  // namespace colreact
