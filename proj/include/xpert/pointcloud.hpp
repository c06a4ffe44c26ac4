#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "xpert/diagram.hpp"

namespace xpert {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PointCloud2D {
  std::vector<Point2> points;

  std::size_t size() const { return points.size(); }
};

/// Linked twist map x' = x + r y (1 - y) mod 1, y' = y + r x' (1 - x') mod 1.
/// Returns the n iterates following (x0, y0).
PointCloud2D generate_orbit(double r, double x0, double y0, std::size_t n);

inline constexpr double kJitterMagnitude = 1e-9;

/// Deterministic per-index perturbation of magnitude kJitterMagnitude used to
/// break duplicate, collinear and cocircular configurations.
PointCloud2D jittered(const PointCloud2D& pc, std::uint64_t seed = 0);

using Triangle = std::array<std::size_t, 3>;

/// Bowyer-Watson Delaunay triangulation of the cloud as given (no jitter is
/// applied here). Triangles are counter-clockwise. Fewer than 3 points or an
/// all-collinear input yields no triangles.
std::vector<Triangle> delaunay(const PointCloud2D& pc);

/// Incircle determinant for counter-clockwise (a, b, c); positive when p lies
/// strictly inside the circumcircle.
long double incircle(Point2 a, Point2 b, Point2 c, Point2 p);
long double orient(Point2 a, Point2 b, Point2 c);

struct SimplexEntry {
  std::vector<std::size_t> vertices;  // sorted, 1 to 3 entries
  double value = 0.0;
};

/// Delaunay complex (on the jittered cloud) with Rips values measured on the
/// original coordinates: vertices at 0, edges at their length, triangles at
/// their longest edge. Sorted by (value, dim, lex).
std::vector<SimplexEntry> weak_alpha_filtration(const PointCloud2D& pc,
                                                std::uint64_t jitter_seed = 0);

/// What happens to classes that never die. `cap` gives them death
/// `essential_cap` (default: the largest value in the filtration). `reduced`
/// drops the eldest dimension-zero class, as in reduced homology, and caps the
/// rest.
enum class EssentialPolicy { cap, reduced };

/// Persistence diagrams for dimensions 0..max_dim. Zero-length pairs are
/// dropped. The dimension-zero pairing is cross-checked against union-find.
std::vector<PersistenceDiagram> persistence(const std::vector<SimplexEntry>& filtration,
                                            int max_dim,
                                            EssentialPolicy policy = EssentialPolicy::cap,
                                            std::optional<double> essential_cap = std::nullopt);

}  // namespace xpert
