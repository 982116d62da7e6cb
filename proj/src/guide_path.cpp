#include "colreact/guide_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>

#include "colreact/voxel_map.hpp"

namespace colreact {

bool line_of_sight(const VoxelMap& map, const Vec3& a, const Vec3& b, double clearance) {
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * map.config().resolution))));
  for (int i = 0; i <= n; ++i) {
    const Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
    if (!map.in_bounds(p) || map.query_distance(p) < clearance) return false;
  }
  return true;
}

std::optional<GuidePath> find_guide_path(const VoxelMap& map, const Vec3& start, const Vec3& goal,
                                         double clearance, double goal_relax_radius) {
  const auto s = map.voxel_of(start);
  auto g = map.voxel_of(goal);
  if (!s || !g) return std::nullopt;

  auto passable = [&](const VoxelIndex& v) { return map.edt(v) >= clearance; };

  GuidePath out;
  out.goal = goal;
  if (!passable(*g)) {
    const double res = map.config().resolution;
    const int r = static_cast<int>(std::ceil(goal_relax_radius / res));
    std::optional<VoxelIndex> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int dk = -r; dk <= r; ++dk)
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          const VoxelIndex v{(*g)[0] + di, (*g)[1] + dj, (*g)[2] + dk};
          if (!map.in_bounds(v) || !passable(v)) continue;
          const double d = (map.center(v) - goal).norm();
          if (d <= goal_relax_radius && d < best_d) {
            best_d = d;
            best = v;
          }
        }
    if (!best) return std::nullopt;
    g = best;
    out.goal = map.center(*best);
    out.goal_relaxed = true;
  }

  const std::size_t n = map.voxel_count();
  const std::size_t start_i = map.linear(*s), goal_i = map.linear(*g);
  std::vector<float> cost(n, std::numeric_limits<float>::infinity());
  std::vector<std::int32_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  const double res = map.config().resolution;
  const Vec3 goal_c = map.center(*g);
  auto heuristic = [&](const VoxelIndex& v) { return (map.center(v) - goal_c).norm(); };

  // (f, insertion order, index): deterministic tie-breaking.
  using Entry = std::tuple<double, std::uint64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t order = 0;
  cost[start_i] = 0.0f;
  open.emplace(heuristic(*s), order++, start_i);

  bool found = false;
  while (!open.empty()) {
    const auto [f, ord, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = 1;
    if (cur == goal_i) {
      found = true;
      break;
    }
    const VoxelIndex cv = map.unlinear(cur);
    const bool cur_clear = passable(cv);
    const double cur_edt = map.edt(cv);
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const VoxelIndex nv{cv[0] + di, cv[1] + dj, cv[2] + dk};
          if (!map.in_bounds(nv)) continue;
          const std::size_t ni = map.linear(nv);
          if (closed[ni]) continue;
          if (!passable(nv) && (cur_clear || map.edt(nv) <= cur_edt)) continue;
          const double step = res * std::sqrt(static_cast<double>(di * di + dj * dj + dk * dk));
          const double c = cost[cur] + step;
          if (c < cost[ni]) {
            cost[ni] = static_cast<float>(c);
            parent[ni] = static_cast<std::int32_t>(cur);
            open.emplace(c + heuristic(nv), order++, ni);
          }
        }
  }
  if (!found) return std::nullopt;

  std::vector<std::size_t> chain;
  for (std::int64_t i = static_cast<std::int64_t>(goal_i); i >= 0; i = parent[i]) {
    chain.push_back(static_cast<std::size_t>(i));
    if (static_cast<std::size_t>(i) == start_i) break;
  }
  std::reverse(chain.begin(), chain.end());
  for (std::size_t i : chain) out.raw.push_back(map.center(map.unlinear(i)));
  out.raw.front() = start;
  out.raw.back() = out.goal;
  if (out.raw.size() == 1) out.raw.push_back(out.goal);

  // Greedy forward shortcutting.
  const double los_clearance = clearance - 0.5 * res;
  out.pruned.push_back(out.raw.front());
  std::size_t i = 0;
  while (i + 1 < out.raw.size()) {
    std::size_t j = i + 1;
    while (j + 1 < out.raw.size() && line_of_sight(map, out.raw[i], out.raw[j + 1], los_clearance))
      ++j;
    out.pruned.push_back(out.raw[j]);
    i = j;
  }
  return out;
}

}  // namespace colreact
