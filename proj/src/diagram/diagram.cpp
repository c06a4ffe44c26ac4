#include "xpert/diagram.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace xpert {

RotatedDiagram rotate(const PersistenceDiagram& d) {
  RotatedDiagram out;
  out.points.reserve(d.size());
  for (const auto& pt : d.points) {
    if (pt.death < pt.birth) {
      throw std::invalid_argument("rotate: point (" + std::to_string(pt.birth) + ", " +
                                  std::to_string(pt.death) +
                                  ") lies below the diagonal; transpose it first");
    }
    out.points.push_back({pt.birth, pt.death - pt.birth});
  }
  return out;
}

PersistenceDiagram transpose(const PersistenceDiagram& d) {
  PersistenceDiagram out{{}, d.homology_dim};
  out.points.reserve(d.size());
  for (const auto& pt : d.points) out.points.push_back({pt.death, pt.birth});
  return out;
}

DiagramPoint diagonal_projection(DiagramPoint u) {
  const double mid = 0.5 * (u.birth + u.death);
  return {mid, mid};
}

RotatedPoint axis_projection(RotatedPoint u) { return {u.birth, 0.0}; }

std::vector<DiagramPoint> canonical(const PersistenceDiagram& d) {
  auto pts = d.points;
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<RotatedPoint> canonical(const RotatedDiagram& d) {
  auto pts = d.points;
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace xpert
