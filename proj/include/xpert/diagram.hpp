#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace xpert {

/// One (birth, death) pair. Both coordinates are finite; essential classes
/// are capped before they reach this type.
struct DiagramPoint {
  double birth = 0.0;
  double death = 0.0;

  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
  friend auto operator<=>(const DiagramPoint&, const DiagramPoint&) = default;
};

/// Multiset of diagram points for a single homology dimension. Point order
/// carries no meaning.
struct PersistenceDiagram {
  std::vector<DiagramPoint> points;
  int homology_dim = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// A point in the birth-persistence plane.
struct RotatedPoint {
  double birth = 0.0;
  double persistence = 0.0;

  friend bool operator==(const RotatedPoint&, const RotatedPoint&) = default;
  friend auto operator<=>(const RotatedPoint&, const RotatedPoint&) = default;
};

struct RotatedDiagram {
  std::vector<RotatedPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// The four sub-diagrams of extended persistence. `rel1` and `ext1_minus`
/// are stored as computed, i.e. below the diagonal (birth >= death).
struct ExtendedPersistenceDiagram {
  PersistenceDiagram ord0{{}, 0};
  PersistenceDiagram rel1{{}, 1};
  PersistenceDiagram ext0_plus{{}, 0};
  PersistenceDiagram ext1_minus{{}, 1};
};

/// Shear (b, d) -> (b, d - b). Throws std::invalid_argument if any point has
/// death < birth.
RotatedDiagram rotate(const PersistenceDiagram& d);

/// Swap birth and death of every point.
PersistenceDiagram transpose(const PersistenceDiagram& d);

/// Orthogonal projection onto the diagonal {(x, x)}.
DiagramPoint diagonal_projection(DiagramPoint u);

/// Orthogonal projection onto the zero-persistence axis of the rotated plane.
RotatedPoint axis_projection(RotatedPoint u);

/// Sorted copy; used to compare multisets.
std::vector<DiagramPoint> canonical(const PersistenceDiagram& d);
std::vector<RotatedPoint> canonical(const RotatedDiagram& d);

}  // namespace xpert
