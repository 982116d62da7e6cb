#include "colreact/voxel_map.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "colreact/edt.hpp"
#include "colreact/errors.hpp"

namespace colreact {

namespace {
constexpr std::uint8_t kMiss = 1;
constexpr std::uint8_t kHit = 2;

double logit(double p) { return std::log(p / (1.0 - p)); }
}  // namespace

void MapConfig::validate() const {
  if (!(resolution > 0.0)) throw ConfigError("map.resolution must be > 0");
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw ConfigError("map.dims must be positive");
  if (!(occupied_threshold > 0.0 && occupied_threshold < 1.0))
    throw ConfigError("map.occupied_threshold must lie in (0, 1)");
  if (!(logodds_min < logodds_max)) throw ConfigError("map log-odds clamp is empty");
  if (!(max_distance > 0.0)) throw ConfigError("map.max_distance must be > 0");
  if (local_window <= 0) throw ConfigError("map.local_window must be > 0");
}

const char* to_string(VoxelState s) {
  switch (s) {
    case VoxelState::Unknown: return "unknown";
    case VoxelState::Free: return "free";
    case VoxelState::Occupied: return "occupied";
  }
  return "?";
}

VoxelMap::VoxelMap(MapConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  occupied_logodds_ = logit(cfg_.occupied_threshold);
  const std::size_t n = static_cast<std::size_t>(cfg_.dims[0]) * cfg_.dims[1] * cfg_.dims[2];
  logodds_.assign(n, 0.0f);
  observed_.assign(n, 0);
  collision_.assign(n, 0);
  sqdist_.assign(n, kEdtInfinity);
  scan_mark_.assign(n, 0);
}

bool VoxelMap::in_bounds(const VoxelIndex& v) const {
  for (int a = 0; a < 3; ++a)
    if (v[a] < 0 || v[a] >= cfg_.dims[a]) return false;
  return true;
}

bool VoxelMap::in_bounds(const Vec3& p) const {
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - cfg_.origin[a]) / cfg_.resolution;
    if (!(u >= 0.0 && u < cfg_.dims[a])) return false;
  }
  return true;
}

std::optional<VoxelIndex> VoxelMap::voxel_of(const Vec3& p) const {
  if (!in_bounds(p)) return std::nullopt;
  VoxelIndex v;
  for (int a = 0; a < 3; ++a) {
    v[a] = std::min(cfg_.dims[a] - 1,
                    static_cast<int>(std::floor((p[a] - cfg_.origin[a]) / cfg_.resolution)));
  }
  return v;
}

Vec3 VoxelMap::center(const VoxelIndex& v) const {
  return cfg_.origin + cfg_.resolution * Vec3(v[0] + 0.5, v[1] + 0.5, v[2] + 0.5);
}

std::size_t VoxelMap::linear(const VoxelIndex& v) const {
  return (static_cast<std::size_t>(v[2]) * cfg_.dims[1] + v[1]) * cfg_.dims[0] + v[0];
}

VoxelIndex VoxelMap::unlinear(std::size_t i) const {
  const std::size_t nx = cfg_.dims[0], ny = cfg_.dims[1];
  return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
          static_cast<int>(i / (nx * ny))};
}

bool VoxelMap::occupied_linear(std::size_t i) const {
  return collision_[i] != 0 || (observed_[i] && logodds_[i] >= occupied_logodds_);
}

VoxelState VoxelMap::state(const VoxelIndex& v) const {
  const std::size_t i = linear(v);
  if (occupied_linear(i)) return VoxelState::Occupied;
  return observed_[i] ? VoxelState::Free : VoxelState::Unknown;
}

std::array<std::size_t, 3> VoxelMap::state_counts() const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (std::size_t i = 0; i < logodds_.size(); ++i) {
    if (occupied_linear(i)) ++c[2];
    else if (observed_[i]) ++c[1];
    else ++c[0];
  }
  return c;
}

void VoxelMap::mark(std::size_t idx, std::uint8_t flag) {
  if (scan_mark_[idx] == 0) touched_.push_back(idx);
  scan_mark_[idx] = std::max(scan_mark_[idx], flag);
}

void VoxelMap::apply_ray(const Vec3& origin, const Vec3& end, bool endpoint_hit) {
  const double res = cfg_.resolution;
  VoxelIndex cur = *voxel_of(origin);
  VoxelIndex last;
  for (int a = 0; a < 3; ++a)
    last[a] = static_cast<int>(std::floor((end[a] - cfg_.origin[a]) / res));

  const Vec3 d = end - origin;
  int step[3];
  double t_max[3], t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (cfg_.origin[a] + (cur[a] + 1) * res - origin[a]) / d[a];
      t_delta[a] = res / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (cfg_.origin[a] + cur[a] * res - origin[a]) / d[a];
      t_delta[a] = -res / d[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  while (cur != last) {
    mark(linear(cur), kMiss);
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) break;  // rounding: we are already in the end voxel
    cur[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    if (!in_bounds(cur)) return;
  }
  mark(linear(cur), endpoint_hit ? kHit : kMiss);
}

void VoxelMap::integrate_scan(const Pose& pose, const std::vector<Vec3>& hits, double max_range,
                              const std::vector<Vec3>& no_return_endpoints) {
  const Vec3 origin = pose.translation;
  const auto sensor = voxel_of(origin);
  if (!sensor) {
    throw OutOfBoundsError(fmt::format("sensor at ({:.3f}, {:.3f}, {:.3f}) is outside the map",
                                       origin.x(), origin.y(), origin.z()));
  }

  touched_.clear();
  auto cast = [&](const Vec3& end, bool hit) {
    Vec3 e = end;
    const Vec3 d = e - origin;
    const double len = d.norm();
    if (len > max_range) {
      e = origin + d * (max_range / len);
      hit = false;
    }
    apply_ray(origin, e, hit);
  };
  for (const auto& h : hits) cast(h, true);
  for (const auto& e : no_return_endpoints) cast(e, false);

  // Per-voxel rule, independent of ray order.
  VoxelRegion box{{cfg_.dims[0], cfg_.dims[1], cfg_.dims[2]}, {0, 0, 0}};
  for (std::size_t idx : touched_) {
    const float delta =
        static_cast<float>(scan_mark_[idx] == kHit ? cfg_.occupancy_hit : cfg_.occupancy_miss);
    logodds_[idx] = std::clamp(logodds_[idx] + delta, static_cast<float>(cfg_.logodds_min),
                               static_cast<float>(cfg_.logodds_max));
    observed_[idx] = 1;
    scan_mark_[idx] = 0;
    const VoxelIndex v = unlinear(idx);
    for (int a = 0; a < 3; ++a) {
      box.lo[a] = std::min(box.lo[a], v[a]);
      box.hi[a] = std::max(box.hi[a], v[a] + 1);
    }
  }
  if (touched_.empty()) return;

  // Distances can change up to the cap away from any updated voxel.
  box = grow(box, edt_margin());
  VoxelRegion window;
  for (int a = 0; a < 3; ++a) {
    window.lo[a] = std::max(box.lo[a], (*sensor)[a] - cfg_.local_window);
    window.hi[a] = std::min(box.hi[a], (*sensor)[a] + cfg_.local_window + 1);
  }
  compute_edt(window);
}

bool VoxelMap::register_collision(const Obb& obb, double t) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& c : obb.corners()) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  VoxelRegion r;
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = static_cast<int>(std::floor((lo[a] - cfg_.origin[a]) / cfg_.resolution));
    r.hi[a] = static_cast<int>(std::floor((hi[a] - cfg_.origin[a]) / cfg_.resolution)) + 1;
  }
  r = clamp_region(r);

  std::size_t count = 0;
  if (!r.empty()) {
    for (int k = r.lo[2]; k < r.hi[2]; ++k)
      for (int j = r.lo[1]; j < r.hi[1]; ++j)
        for (int i = r.lo[0]; i < r.hi[0]; ++i) {
          const VoxelIndex v{i, j, k};
          if (!obb.contains(center(v))) continue;
          const std::size_t idx = linear(v);
          collision_[idx] = 1;
          observed_[idx] = 1;
          ++count;
        }
  }
  if (count == 0) return false;
  registry_.push_back({obb, t, count});
  compute_edt(grow(r, edt_margin()));
  return true;
}

VoxelRegion VoxelMap::clamp_region(VoxelRegion r) const {
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = std::clamp(r.lo[a], 0, cfg_.dims[a]);
    r.hi[a] = std::clamp(r.hi[a], 0, cfg_.dims[a]);
  }
  return r;
}

int VoxelMap::edt_margin() const {
  return static_cast<int>(std::ceil(cfg_.max_distance / cfg_.resolution)) + 1;
}

VoxelRegion VoxelMap::grow(VoxelRegion r, int margin) const {
  for (int a = 0; a < 3; ++a) {
    r.lo[a] -= margin;
    r.hi[a] += margin;
  }
  return clamp_region(r);
}

void VoxelMap::compute_edt(const VoxelRegion& region_in) {
  const VoxelRegion region = clamp_region(region_in);
  if (region.empty()) return;
  const VoxelRegion ext = grow(region, edt_margin());

  const std::array<int, 3> sub{ext.hi[0] - ext.lo[0], ext.hi[1] - ext.lo[1], ext.hi[2] - ext.lo[2]};
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(sub[0]) * sub[1] * sub[2]);
  std::size_t s = 0;
  for (int k = ext.lo[2]; k < ext.hi[2]; ++k)
    for (int j = ext.lo[1]; j < ext.hi[1]; ++j) {
      const std::size_t row = linear({ext.lo[0], j, k});
      for (int i = 0; i < sub[0]; ++i) occ[s++] = occupied_linear(row + i) ? 1 : 0;
    }

  const std::vector<std::int64_t> sq = squared_edt(occ, sub);
  const double cap_vox = cfg_.max_distance / cfg_.resolution;
  const double cap_sq = cap_vox * cap_vox;
  for (int k = region.lo[2]; k < region.hi[2]; ++k)
    for (int j = region.lo[1]; j < region.hi[1]; ++j)
      for (int i = region.lo[0]; i < region.hi[0]; ++i) {
        const std::size_t local =
            (static_cast<std::size_t>(k - ext.lo[2]) * sub[1] + (j - ext.lo[1])) * sub[0] +
            (i - ext.lo[0]);
        const std::int64_t d = sq[local];
        sqdist_[linear({i, j, k})] =
            (d == kEdtInfinity || static_cast<double>(d) > cap_sq) ? kEdtInfinity : d;
      }
}

std::int64_t VoxelMap::squared_voxel_distance(const VoxelIndex& v) const {
  return sqdist_[linear(v)];
}

double VoxelMap::edt(const VoxelIndex& v) const {
  const std::int64_t d = sqdist_[linear(v)];
  if (d == kEdtInfinity) return cfg_.max_distance;
  return std::min(cfg_.max_distance, std::sqrt(static_cast<double>(d)) * cfg_.resolution);
}

double VoxelMap::query_distance(const Vec3& p) const {
  if (!in_bounds(p)) {
    throw OutOfBoundsError(
        fmt::format("distance query at ({:.3f}, {:.3f}, {:.3f}) is outside the map", p.x(), p.y(),
                    p.z()));
  }
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - cfg_.origin[a]) / cfg_.resolution - 0.5;
    const int hi = std::max(0, cfg_.dims[a] - 2);
    i0[a] = std::clamp(static_cast<int>(std::floor(u)), 0, hi);
    f[a] = cfg_.dims[a] > 1 ? std::clamp(u - i0[a], 0.0, 1.0) : 0.0;
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    VoxelIndex v;
    double w = 1.0;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      v[a] = std::min(i0[a] + bit, cfg_.dims[a] - 1);
      w *= bit ? f[a] : 1.0 - f[a];
    }
    if (w != 0.0) acc += w * edt(v);
  }
  return acc;
}

Vec3 VoxelMap::query_gradient(const Vec3& p) const {
  const double h = cfg_.resolution;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = p, hi = p;
    lo[a] -= h;
    hi[a] += h;
    if (!in_bounds(lo) || !in_bounds(hi)) {
      throw OutOfBoundsError("gradient query lacks a one-voxel margin inside the map");
    }
    g[a] = (query_distance(hi) - query_distance(lo)) / (2.0 * h);
  }
  return g;
}

DistanceSample VoxelMap::query(const Vec3& p) const {
  return DistanceSample{query_distance(p), query_gradient(p)};
}

}  // namespace colreact
