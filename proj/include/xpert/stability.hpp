#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xpert/diagram.hpp"

namespace xpert {

/// 1..max_points points, birth ~ U[0, 5], persistence ~ U(0, 5].
PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t max_points = 10);

struct StabilityResult {
  std::string suite;
  std::size_t cases = 0;
  double worst_ratio = 0.0;  // max of lhs / bound
  std::size_t violations = 0;  // lhs > bound + tolerance
};

inline constexpr double kStabilityTolerance = 1e-9;

/// W(Pi_delta(D_r), D_r) <= sqrt(|D| / 2) delta, for each delta in `deltas`.
StabilityResult check_projection_cost(std::size_t cases, const std::vector<double>& deltas,
                                      std::uint64_t seed);
/// W(D_r, D'_r) <= sqrt(3) W(D, D').
StabilityResult check_rotation_stability(std::size_t cases, std::uint64_t seed);
/// W(Pi(D_r), Pi(D'_r)) <= ((sqrt|D| + sqrt|D'|) / sqrt 2 + sqrt 3) W(D, D')
/// with delta drawn from (0, W(D, D')).
StabilityResult check_projected_stability(std::size_t cases, std::uint64_t seed);

/// All three suites, every distance (2, 2)-Wasserstein.
std::vector<StabilityResult> run_stability_suites(std::size_t cases, std::uint64_t seed);

}  // namespace xpert
