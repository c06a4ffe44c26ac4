#include "xpert/stability.hpp"

#include <algorithm>
#include <cmath>

#include "xpert/ppd.hpp"
#include "xpert/wasserstein.hpp"

namespace xpert {

PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t max_points) {
  std::uniform_int_distribution<std::size_t> count(1, max_points);
  std::uniform_real_distribution<double> birth(0.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PersistenceDiagram d;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = birth(rng);
    const double p = 5.0 * (1.0 - unit(rng));  // (0, 5]
    d.points.push_back({b, b + p});
  }
  return d;
}

namespace {

void record(StabilityResult& r, double lhs, double bound) {
  ++r.cases;
  if (bound > 0.0) r.worst_ratio = std::max(r.worst_ratio, lhs / bound);
  if (lhs > bound + kStabilityTolerance) ++r.violations;
}

}  // namespace

StabilityResult check_projection_cost(std::size_t cases, const std::vector<double>& deltas,
                                      std::uint64_t seed) {
  StabilityResult r{"projection-cost"};
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const auto d = random_diagram(rng);
    const auto dr = rotate(d);
    for (double delta : deltas) {
      const double lhs = wasserstein(project(dr, delta), dr, 2.0, 2.0);
      record(r, lhs, std::sqrt(static_cast<double>(d.size()) / 2.0) * delta);
    }
  }
  return r;
}

StabilityResult check_rotation_stability(std::size_t cases, std::uint64_t seed) {
  StabilityResult r{"rotation-stability"};
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const auto a = random_diagram(rng);
    const auto b = random_diagram(rng);
    const double lhs = wasserstein(rotate(a), rotate(b), 2.0, 2.0);
    record(r, lhs, std::sqrt(3.0) * wasserstein(a, b, 2.0, 2.0));
  }
  return r;
}

StabilityResult check_projected_stability(std::size_t cases, std::uint64_t seed) {
  StabilityResult r{"projected-stability"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (r.cases < cases) {
    const auto a = random_diagram(rng);
    const auto b = random_diagram(rng);
    const double w = wasserstein(a, b, 2.0, 2.0);
    if (!(w > 0.0)) continue;
    const double delta = w * (1.0 - unit(rng));  // (0, w]
    if (!(delta < w)) continue;
    const double lhs = wasserstein(project(rotate(a), delta), project(rotate(b), delta), 2.0, 2.0);
    const double factor =
        (std::sqrt(static_cast<double>(a.size())) + std::sqrt(static_cast<double>(b.size()))) /
            std::sqrt(2.0) +
        std::sqrt(3.0);
    record(r, lhs, factor * w);
  }
  return r;
}

std::vector<StabilityResult> run_stability_suites(std::size_t cases, std::uint64_t seed) {
  return {check_projection_cost(cases, {0.1, 0.01}, seed),
          check_rotation_stability(cases, seed + 1),
          check_projected_stability(cases, seed + 2)};
}

}  // namespace xpert
