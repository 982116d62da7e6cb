#pragma once

#include <optional>
#include <vector>

#include "colreact/geometry.hpp"

namespace colreact {

class VoxelMap;

struct GuidePath {
  std::vector<Vec3> raw;     // voxel-center path, start and goal included
  std::vector<Vec3> pruned;  // line-of-sight shortcut of `raw`
  Vec3 goal = Vec3::Zero();  // goal actually used (after relaxation)
  bool goal_relaxed = false;
};

/// 26-connected A* over voxels whose EDT is at least `clearance`. Unknown
/// space is traversable. A start inside the clearance margin may only move
/// toward larger distances until it is clear. A goal inside the margin is
/// replaced by the closest traversable voxel within `goal_relax_radius`.
std::optional<GuidePath> find_guide_path(const VoxelMap& map, const Vec3& start, const Vec3& goal,
                                         double clearance, double goal_relax_radius);

/// True when every point sampled at half-voxel spacing on [a, b] has an
/// interpolated EDT of at least `clearance`.
bool line_of_sight(const VoxelMap& map, const Vec3& a, const Vec3& b, double clearance);

}  // namespace colreact
