#include "colreact/edt.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace colreact {

namespace {

// 1-D squared distance transform of a sampled function f (kEdtInfinity marks
// samples outside the domain). Lower envelope of parabolas, exact on integers.
void transform_line(std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                    std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kEdtInfinity) continue;
    const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
      const double s = (fq - fp) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    if (k == 0) {
      z[k] = -std::numeric_limits<double>::infinity();
    } else {
      const int p = v[k - 1];
      const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
      z[k] = (fq - fp) / (2.0 * (q - p));
    }
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kEdtInfinity);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (j < k && z[j + 1] < q) ++j;
    const std::int64_t d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<std::int64_t> squared_edt(std::span<const std::uint8_t> occupied,
                                      const std::array<int, 3>& dims) {
  const auto [nx, ny, nz] = dims;
  if (nx <= 0 || ny <= 0 || nz <= 0) throw std::invalid_argument("EDT dims must be positive");
  const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
  if (occupied.size() != total) throw std::invalid_argument("EDT occupancy size mismatch");

  std::vector<std::int64_t> grid(total);
  for (std::size_t i = 0; i < total; ++i) grid[i] = occupied[i] ? 0 : kEdtInfinity;

  const int longest = std::max({nx, ny, nz});
  std::vector<std::int64_t> f(longest), out(longest);
  std::vector<int> v(longest);
  std::vector<double> z(longest + 1);

  auto pass = [&](int n, std::size_t stride, auto&& starts) {
    f.resize(n);
    out.resize(n);
    for (std::size_t base : starts) {
      for (int i = 0; i < n; ++i) f[i] = grid[base + i * stride];
      transform_line(f, out, v, z);
      for (int i = 0; i < n; ++i) grid[base + i * stride] = out[i];
    }
  };

  const std::size_t sx = 1, sy = nx, sz = static_cast<std::size_t>(nx) * ny;
  std::vector<std::size_t> starts;

  starts.clear();
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) starts.push_back(k * sz + j * sy);
  pass(nx, sx, starts);

  starts.clear();
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) starts.push_back(k * sz + i * sx);
  pass(ny, sy, starts);

  starts.clear();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) starts.push_back(j * sy + i * sx);
  pass(nz, sz, starts);

  return grid;
}

}  // namespace colreact
