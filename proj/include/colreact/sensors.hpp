#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "colreact/detection.hpp"
#include "colreact/physics.hpp"

namespace colreact {

/// Spinning multi-channel range sensor: `channels` elevation rings spread
/// evenly over the vertical FOV, one ray every `h_res_deg` of azimuth.
struct ScanPattern {
  double h_fov_deg = 360.0;
  double v_fov_deg = 30.0;
  double h_res_deg = 2.0;
  int channels = 16;
  double max_range = 10.0;

  void validate() const;
  std::vector<Vec3> directions_body() const;
};

struct ScanResult {
  std::vector<Vec3> hits;                 // world frame
  std::vector<Vec3> no_return_endpoints;  // max-range endpoints of rays with no return
};

/// Entry distance of a ray into a box (slab test), if within [0, max_t].
std::optional<double> ray_box_entry(const Vec3& origin, const Vec3& dir, const Obstacle& box,
                                    double max_t);

/// Ray-casts the pattern against every opaque obstacle; transparent ones are skipped.
ScanResult simulate_scan(const Pose& pose, std::span<const Obstacle> obstacles,
                         const ScanPattern& pattern);

/// Accelerometer reading: body-frame specific force of (true_accel + spike)
/// plus per-axis Gaussian noise of standard deviation `sigma`.
ImuSample synthesize_imu(double t, const Vec3& true_accel_world, const Vec3& spike_world,
                         const Rotation& world_to_body, double g, double sigma,
                         std::mt19937_64& rng);

}  // namespace colreact
