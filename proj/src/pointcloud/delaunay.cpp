#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "xpert/pointcloud.hpp"

namespace xpert {

long double orient(Point2 a, Point2 b, Point2 c) {
  const long double abx = static_cast<long double>(b.x) - a.x;
  const long double aby = static_cast<long double>(b.y) - a.y;
  const long double acx = static_cast<long double>(c.x) - a.x;
  const long double acy = static_cast<long double>(c.y) - a.y;
  return abx * acy - aby * acx;
}

long double incircle(Point2 a, Point2 b, Point2 c, Point2 p) {
  const long double adx = static_cast<long double>(a.x) - p.x;
  const long double ady = static_cast<long double>(a.y) - p.y;
  const long double bdx = static_cast<long double>(b.x) - p.x;
  const long double bdy = static_cast<long double>(b.y) - p.y;
  const long double cdx = static_cast<long double>(c.x) - p.x;
  const long double cdy = static_cast<long double>(c.y) - p.y;
  const long double alift = adx * adx + ady * ady;
  const long double blift = bdx * bdx + bdy * bdy;
  const long double clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - blift * cdy) - ady * (bdx * clift - blift * cdx) +
         alift * (bdx * cdy - bdy * cdx);
}

namespace {

constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();

// Counter-clockwise triangle; a ghost triangle (a, b, inf) stores the
// infinite vertex last and has the unbounded face to the left of a -> b.
struct Tri {
  std::array<std::size_t, 3> v;
  bool ghost() const { return v[2] == kInfinite; }
};

Tri normalized(std::size_t a, std::size_t b, std::size_t c) {
  if (a == kInfinite) return {{b, c, a}};
  if (b == kInfinite) return {{c, a, b}};
  return {{a, b, c}};
}

class Triangulator {
 public:
  explicit Triangulator(const std::vector<Point2>& pts) : pts_(pts) {}

  std::vector<Triangle> run() {
    const std::size_t n = pts_.size();
    if (n < 3) return {};
    std::size_t i0 = 0, i1 = kInfinite, i2 = kInfinite;
    for (std::size_t i = 1; i < n && i1 == kInfinite; ++i) {
      if (!(pts_[i] == pts_[i0])) i1 = i;
    }
    if (i1 == kInfinite) return {};
    for (std::size_t i = 1; i < n && i2 == kInfinite; ++i) {
      if (i != i1 && orient(pts_[i0], pts_[i1], pts_[i]) != 0) i2 = i;
    }
    if (i2 == kInfinite) return {};
    if (orient(pts_[i0], pts_[i1], pts_[i2]) < 0) std::swap(i1, i2);

    tris_ = {Tri{{i0, i1, i2}}, Tri{{i1, i0, kInfinite}}, Tri{{i2, i1, kInfinite}},
             Tri{{i0, i2, kInfinite}}};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2) continue;
      insert(i);
    }

    std::vector<Triangle> out;
    for (const auto& t : tris_) {
      if (!t.ghost()) out.push_back(t.v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  bool in_conflict(const Tri& t, Point2 p) const {
    if (!t.ghost()) return incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0;
    const Point2 a = pts_[t.v[0]];
    const Point2 b = pts_[t.v[1]];
    const long double o = orient(a, b, p);
    if (o > 0) return true;
    if (o < 0) return false;
    const double dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
    return dot > 0 && dot < len2;
  }

  bool contains(const Tri& t, Point2 p) const {
    if (t.ghost()) return orient(pts_[t.v[0]], pts_[t.v[1]], p) > 0;
    for (int k = 0; k < 3; ++k) {
      if (orient(pts_[t.v[k]], pts_[t.v[(k + 1) % 3]], p) < 0) return false;
    }
    return true;
  }

  static bool shares_edge(const Tri& a, const Tri& b) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (a.v[i] == b.v[(j + 1) % 3] && a.v[(i + 1) % 3] == b.v[j]) return true;
      }
    }
    return false;
  }

  void insert(std::size_t idx) {
    const Point2 p = pts_[idx];
    std::vector<std::size_t> conflict;
    std::size_t seed = kInfinite;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (in_conflict(tris_[t], p)) conflict.push_back(t);
      if (seed == kInfinite && !tris_[t].ghost() && contains(tris_[t], p)) seed = t;
    }
    if (seed == kInfinite) {
      for (std::size_t t : conflict) {
        if (tris_[t].ghost() && contains(tris_[t], p)) {
          seed = t;
          break;
        }
      }
    }
    if (seed == kInfinite) return;  // cannot place the point; leave it out
    if (std::find(conflict.begin(), conflict.end(), seed) == conflict.end()) {
      conflict.push_back(seed);
    }

    // The cavity is the edge-connected part of the conflict set around seed.
    std::vector<std::size_t> cavity{seed};
    std::vector<bool> taken(conflict.size(), false);
    for (std::size_t k = 0; k < conflict.size(); ++k) taken[k] = conflict[k] == seed;
    for (std::size_t head = 0; head < cavity.size(); ++head) {
      for (std::size_t k = 0; k < conflict.size(); ++k) {
        if (!taken[k] && shares_edge(tris_[cavity[head]], tris_[conflict[k]])) {
          taken[k] = true;
          cavity.push_back(conflict[k]);
        }
      }
    }

    std::vector<std::pair<std::size_t, std::size_t>> boundary;
    for (std::size_t c : cavity) {
      const auto& t = tris_[c];
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = t.v[e];
        const std::size_t b = t.v[(e + 1) % 3];
        bool inner = false;
        for (std::size_t other : cavity) {
          if (other == c) continue;
          const auto& u = tris_[other];
          for (int f = 0; f < 3 && !inner; ++f) inner = u.v[f] == b && u.v[(f + 1) % 3] == a;
          if (inner) break;
        }
        if (!inner) boundary.emplace_back(a, b);
      }
    }

    std::sort(cavity.begin(), cavity.end(), std::greater<>());
    for (std::size_t c : cavity) {
      tris_[c] = tris_.back();
      tris_.pop_back();
    }
    for (const auto& [a, b] : boundary) {
      if (a == kInfinite && b == kInfinite) continue;
      tris_.push_back(normalized(a, b, idx));
    }
  }

  const std::vector<Point2>& pts_;
  std::vector<Tri> tris_;
};

}  // namespace

std::vector<Triangle> delaunay(const PointCloud2D& pc) { return Triangulator(pc.points).run(); }

}  // namespace xpert
