#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "colreact/collision_cloud.hpp"
#include "colreact/geometry.hpp"
#include "colreact/recovery.hpp"

namespace colreact {

struct MapConfig {
  double resolution = 0.1;
  Vec3 origin = Vec3::Zero();          // min corner of voxel (0,0,0)
  std::array<int, 3> dims{64, 64, 32};
  double occupancy_hit = 0.85;         // log-odds increments
  double occupancy_miss = -0.4;
  double logodds_min = -4.0;
  double logodds_max = 6.0;
  double occupied_threshold = 0.7;     // probability
  int local_window = 100;              // half-size (voxels) of the scan update window
  double max_distance = 2.0;           // EDT cap / sentinel, m

  void validate() const;
};

enum class VoxelState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

const char* to_string(VoxelState s);

using VoxelIndex = std::array<int, 3>;

/// Inclusive-exclusive voxel index box.
struct VoxelRegion {
  VoxelIndex lo{0, 0, 0};
  VoxelIndex hi{0, 0, 0};

  bool empty() const { return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2]; }
};

struct RegisteredObb {
  Obb box;
  double t = 0.0;
  std::size_t voxel_count = 0;
};

/// Occupancy grid with a capped, exact Euclidean distance transform and an
/// append-only registry of collision boxes.
///
/// Collision-registered voxels carry a flag that overrides the log-odds, so
/// no amount of range-sensor evidence can free them. Unknown voxels never
/// count as obstacles for the distance transform.
class VoxelMap {
 public:
  explicit VoxelMap(MapConfig cfg);

  const MapConfig& config() const { return cfg_; }
  const std::array<int, 3>& dims() const { return cfg_.dims; }
  std::size_t voxel_count() const { return logodds_.size(); }

  bool in_bounds(const Vec3& p) const;
  bool in_bounds(const VoxelIndex& v) const;
  std::optional<VoxelIndex> voxel_of(const Vec3& p) const;
  Vec3 center(const VoxelIndex& v) const;
  std::size_t linear(const VoxelIndex& v) const;
  VoxelIndex unlinear(std::size_t i) const;
  VoxelRegion full_region() const { return {{0, 0, 0}, cfg_.dims}; }

  VoxelState state(const VoxelIndex& v) const;
  bool is_collision_voxel(const VoxelIndex& v) const { return collision_[linear(v)] != 0; }
  double logodds(const VoxelIndex& v) const { return logodds_[linear(v)]; }

  /// Ray-casts every hit (and every no-return endpoint, cleared up to
  /// `max_range`) from the sensor origin. Within one scan each voxel is
  /// updated at most once: hit beats miss. Then refreshes the EDT around the
  /// sensor. Throws OutOfBoundsError if the sensor lies outside the map.
  void integrate_scan(const Pose& pose, const std::vector<Vec3>& hits, double max_range,
                      const std::vector<Vec3>& no_return_endpoints = {});

  /// Marks every voxel whose center lies inside the box as a collision voxel.
  /// Returns false (and registers nothing) when no voxel center falls inside.
  bool register_collision(const Obb& obb, double t = 0.0);
  const std::vector<RegisteredObb>& registry() const { return registry_; }

  /// Exact EDT over `region`, using every occupied voxel within max_distance
  /// of it. Values beyond max_distance read as max_distance.
  void compute_edt(const VoxelRegion& region);
  void compute_edt() { compute_edt(full_region()); }

  /// Squared distance (voxel units) to the nearest occupied voxel center, or
  /// kEdtInfinity past the cap.
  std::int64_t squared_voxel_distance(const VoxelIndex& v) const;
  /// EDT value of a voxel in meters (capped).
  double edt(const VoxelIndex& v) const;

  /// Trilinear interpolation of the EDT. Throws OutOfBoundsError.
  double query_distance(const Vec3& p) const;
  /// Central difference of query_distance with a one-voxel step. Throws
  /// OutOfBoundsError unless p +- resolution stays inside the map.
  Vec3 query_gradient(const Vec3& p) const;
  DistanceSample query(const Vec3& p) const;

  /// Number of voxels in each state.
  std::array<std::size_t, 3> state_counts() const;

 private:
  void apply_ray(const Vec3& origin, const Vec3& end, bool endpoint_hit);
  void mark(std::size_t idx, std::uint8_t flag);
  VoxelRegion clamp_region(VoxelRegion r) const;
  VoxelRegion grow(VoxelRegion r, int margin) const;
  int edt_margin() const;
  bool occupied_linear(std::size_t i) const;

  MapConfig cfg_;
  double occupied_logodds_;
  std::vector<float> logodds_;
  std::vector<std::uint8_t> observed_;
  std::vector<std::uint8_t> collision_;
  std::vector<std::int64_t> sqdist_;
  std::vector<RegisteredObb> registry_;

  // Per-scan scratch: 1 = miss, 2 = hit.
  std::vector<std::uint8_t> scan_mark_;
  std::vector<std::size_t> touched_;
};

}  // namespace colreact
