#pragma once

#include <cstddef>
#include <vector>

#include "xpert/diagram.hpp"

namespace xpert {

/// Minimum-cost perfect assignment on a dense square cost matrix (row-major,
/// n x n). Returns the column assigned to each row. Hungarian method with
/// potentials, O(n^3).
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

/// Exact (p, q)-Wasserstein distance between persistence diagrams. Points may
/// be matched to points of the other diagram or to their own projection onto
/// the diagonal. Throws std::invalid_argument when p < 1 or q < 1.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, double q);

/// Same distance for diagrams in the birth-persistence plane, where the
/// diagonal has been sheared onto the axis {persistence = 0}.
double wasserstein(const RotatedDiagram& a, const RotatedDiagram& b, double p, double q);

/// Exhaustive enumeration of all partial matchings. Test oracle; rejects
/// inputs with |a| + |b| > kBruteforceLimit.
inline constexpr std::size_t kBruteforceLimit = 8;
double wasserstein_bruteforce(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                              double q);
double wasserstein_bruteforce(const RotatedDiagram& a, const RotatedDiagram& b, double p,
                              double q);

/// ||u - v||_q for planar points; q = +inf selects the max norm.
double planar_norm(double dx, double dy, double q);

}  // namespace xpert
