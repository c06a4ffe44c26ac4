#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "xpert/pointcloud.hpp"
#include "xpert/reduction.hpp"

namespace xpert {
namespace {

using Edge = std::pair<std::size_t, std::size_t>;

// Delaunay graph of collinear input: consecutive points along the line.
std::vector<Edge> collinear_chain(const std::vector<Point2>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Point2 a = pts.front();
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::hypot(pts[i].x - a.x, pts[i].y - a.y);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  const double dx = pts[far].x - a.x;
  const double dy = pts[far].y - a.y;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return (pts[i].x - a.x) * dx + (pts[i].y - a.y) * dy <
           (pts[j].x - a.x) * dx + (pts[j].y - a.y) * dy;
  });
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    edges.emplace_back(std::min(order[k], order[k + 1]), std::max(order[k], order[k + 1]));
  }
  return edges;
}

struct EdgeHash {
  std::size_t operator()(const Edge& e) const {
    return std::hash<std::size_t>{}(e.first * 0x9e3779b97f4a7c15ULL ^ e.second);
  }
};

}  // namespace

std::vector<SimplexEntry> weak_alpha_filtration(const PointCloud2D& pc, std::uint64_t jitter_seed) {
  const auto& pts = pc.points;
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("weak_alpha_filtration: non-finite coordinate");
    }
  }
  const auto triangles = delaunay(jittered(pc, jitter_seed));

  std::vector<Edge> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = t[k];
      const std::size_t b = t[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (triangles.empty() && pts.size() >= 2) edges = collinear_chain(pts);

  auto length = [&](std::size_t a, std::size_t b) {
    return std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
  };

  std::vector<SimplexEntry> out;
  out.reserve(pts.size() + edges.size() + triangles.size());
  for (std::size_t v = 0; v < pts.size(); ++v) out.push_back({{v}, 0.0});
  for (const auto& [a, b] : edges) out.push_back({{a, b}, length(a, b)});
  for (const auto& t : triangles) {
    std::vector<std::size_t> verts(t.begin(), t.end());
    std::sort(verts.begin(), verts.end());
    const double value = std::max({length(verts[0], verts[1]), length(verts[0], verts[2]),
                                   length(verts[1], verts[2])});
    out.push_back({std::move(verts), value});
  }
  std::stable_sort(out.begin(), out.end(), [](const SimplexEntry& a, const SimplexEntry& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
  });
  return out;
}

std::vector<PersistenceDiagram> persistence(const std::vector<SimplexEntry>& filtration,
                                            int max_dim, EssentialPolicy policy,
                                            std::optional<double> essential_cap) {
  if (max_dim < 0) throw std::invalid_argument("persistence: max_dim must be non-negative");

  FilteredComplex complex;
  complex.boundary.reserve(filtration.size());
  complex.dims.reserve(filtration.size());
  std::unordered_map<std::size_t, std::size_t> vertex_at;
  std::unordered_map<Edge, std::size_t, EdgeHash> edge_at;
  auto malformed = [](std::size_t j, const std::string& why) {
    return std::invalid_argument("persistence: filtration entry " + std::to_string(j) + " " + why);
  };

  double max_value = 0.0;
  for (std::size_t j = 0; j < filtration.size(); ++j) {
    const auto& s = filtration[j];
    if (!std::is_sorted(s.vertices.begin(), s.vertices.end())) {
      throw malformed(j, "has unsorted vertices");
    }
    if (j > 0 && s.value < filtration[j - 1].value) throw malformed(j, "decreases the value");
    max_value = std::max(max_value, s.value);
    std::vector<std::size_t> faces;
    auto lookup_edge = [&](std::size_t a, std::size_t b) {
      const auto it = edge_at.find({a, b});
      if (it == edge_at.end()) throw malformed(j, "appears before one of its edges");
      return it->second;
    };
    switch (s.vertices.size()) {
      case 1:
        if (!vertex_at.emplace(s.vertices[0], j).second) throw malformed(j, "repeats a vertex");
        break;
      case 2: {
        for (std::size_t v : s.vertices) {
          const auto it = vertex_at.find(v);
          if (it == vertex_at.end()) throw malformed(j, "appears before one of its vertices");
          faces.push_back(it->second);
        }
        if (!edge_at.emplace(Edge{s.vertices[0], s.vertices[1]}, j).second) {
          throw malformed(j, "repeats an edge");
        }
        break;
      }
      case 3:
        faces = {lookup_edge(s.vertices[0], s.vertices[1]),
                 lookup_edge(s.vertices[0], s.vertices[2]),
                 lookup_edge(s.vertices[1], s.vertices[2])};
        break;
      default:
        throw malformed(j, "is not a vertex, edge or triangle");
    }
    std::sort(faces.begin(), faces.end());
    complex.boundary.push_back(std::move(faces));
    complex.dims.push_back(static_cast<int>(s.vertices.size()) - 1);
  }

  const auto pairing = reduce(complex);
  const auto zero_dim = union_find_pairs(complex);
  {
    std::vector<IndexPair> reduced_zero;
    for (const auto& pr : pairing.pairs) {
      if (complex.dims[pr.birth] == 0) reduced_zero.push_back(pr);
    }
    if (reduced_zero != zero_dim.pairs) {
      throw std::logic_error("persistence: matrix reduction disagrees with union-find in dimension 0");
    }
  }

  const double cap = essential_cap.value_or(max_value);
  std::vector<PersistenceDiagram> diagrams;
  for (int d = 0; d <= max_dim; ++d) diagrams.push_back({{}, d});
  for (const auto& [b, d] : pairing.pairs) {
    const int dim = complex.dims[b];
    if (dim > max_dim) continue;
    const double birth = filtration[b].value;
    const double death = filtration[d].value;
    if (birth == death) continue;
    diagrams[dim].points.push_back({birth, death});
  }
  bool dropped_eldest = false;
  for (std::size_t e : pairing.essential) {
    const int dim = complex.dims[e];
    if (policy == EssentialPolicy::reduced && dim == 0 && !dropped_eldest) {
      dropped_eldest = true;  // essentials are in filtration order
      continue;
    }
    if (dim > max_dim) continue;
    diagrams[dim].points.push_back({filtration[e].value, cap});
  }
  return diagrams;
}

}  // namespace xpert
