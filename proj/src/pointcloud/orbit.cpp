#include <cmath>
#include <cstdint>

#include "xpert/pointcloud.hpp"
#include "xpert/random.hpp"

namespace xpert {
namespace {

// Uniform in [-1, 1).
double signed_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

PointCloud2D generate_orbit(double r, double x0, double y0, std::size_t n) {
  PointCloud2D pc;
  pc.points.reserve(n);
  double x = x0;
  double y = y0;
  for (std::size_t k = 0; k < n; ++k) {
    x = std::fmod(x + r * y * (1.0 - y), 1.0);
    y = std::fmod(y + r * x * (1.0 - x), 1.0);
    pc.points.push_back({x, y});
  }
  return pc;
}

PointCloud2D jittered(const PointCloud2D& pc, std::uint64_t seed) {
  PointCloud2D out = pc;
  const std::uint64_t base = splitmix64(seed);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const std::uint64_t key = base ^ (static_cast<std::uint64_t>(i) * 2);
    out.points[i].x += kJitterMagnitude * signed_unit(splitmix64(key));
    out.points[i].y += kJitterMagnitude * signed_unit(splitmix64(key + 1));
  }
  return out;
}

}  // namespace xpert
