#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace colreact {

/// Sentinel for "no occupied voxel reachable".
inline constexpr std::int64_t kEdtInfinity = std::numeric_limits<std::int64_t>::max();

/// Exact squared Euclidean distance transform (in voxel units) of a dense
/// x-fastest grid. Separable lower-envelope passes along x, y and z; every
/// voxel receives the squared distance to the nearest voxel with
/// `occupied[i] != 0`, or kEdtInfinity when there is none.
std::vector<std::int64_t> squared_edt(std::span<const std::uint8_t> occupied,
                                      const std::array<int, 3>& dims);

}  // namespace colreact
