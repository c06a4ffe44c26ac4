#include "xpert/wasserstein.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace xpert {
namespace {

struct Planar {
  double x;
  double y;
};

void check_exponents(double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) {
    throw std::invalid_argument("wasserstein: exponents must satisfy p >= 1 and q >= 1 (got p=" +
                                std::to_string(p) + ", q=" + std::to_string(q) + ")");
  }
}

// Cost of moving u to v, already raised to the power p.
double ground_cost(Planar u, Planar v, double p, double q) {
  return std::pow(planar_norm(u.x - v.x, u.y - v.y, q), p);
}

// Augmented square problem: rows are the points of `a` followed by one
// diagonal slot per point of `b`; columns are the points of `b` followed by
// one diagonal slot per point of `a`.
double matched_distance(const std::vector<Planar>& a, const std::vector<Planar>& a_diag,
                        const std::vector<Planar>& b, const std::vector<Planar>& b_diag,
                        double p, double q) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t size = n + m;
  if (size == 0) return 0.0;

  std::vector<double> to_diag_a(n);
  std::vector<double> to_diag_b(m);
  for (std::size_t i = 0; i < n; ++i) to_diag_a[i] = ground_cost(a[i], a_diag[i], p, q);
  for (std::size_t j = 0; j < m; ++j) to_diag_b[j] = ground_cost(b[j], b_diag[j], p, q);

  std::vector<double> cost(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      double c = 0.0;
      if (i < n && j < m) {
        c = ground_cost(a[i], b[j], p, q);
      } else if (i < n) {
        c = to_diag_a[i];
      } else if (j < m) {
        c = to_diag_b[j];
      }
      cost[i * size + j] = c;
    }
  }

  const auto assignment = solve_assignment(cost, size);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) total += cost[i * size + assignment[i]];
  return std::pow(total, 1.0 / p);
}

double enumerate(const std::vector<Planar>& a, const std::vector<Planar>& a_diag,
                 const std::vector<Planar>& b, const std::vector<Planar>& b_diag, double p,
                 double q) {
  if (a.size() + b.size() > kBruteforceLimit) {
    throw std::invalid_argument("wasserstein_bruteforce: at most " +
                                std::to_string(kBruteforceLimit) + " points in total");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<bool> used(m, false);
  double best = std::numeric_limits<double>::infinity();

  std::function<void(std::size_t, double)> recurse = [&](std::size_t i, double acc) {
    if (i == n) {
      double total = acc;
      for (std::size_t j = 0; j < m; ++j) {
        if (!used[j]) total += ground_cost(b[j], b_diag[j], p, q);
      }
      best = std::min(best, total);
      return;
    }
    recurse(i + 1, acc + ground_cost(a[i], a_diag[i], p, q));
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = true;
      recurse(i + 1, acc + ground_cost(a[i], b[j], p, q));
      used[j] = false;
    }
  };
  recurse(0, 0.0);
  return std::pow(best, 1.0 / p);
}

struct Prepared {
  std::vector<Planar> pts;
  std::vector<Planar> diag;
};

Prepared prepare(const PersistenceDiagram& d) {
  Prepared out;
  for (const auto& u : d.points) {
    const auto proj = diagonal_projection(u);
    out.pts.push_back({u.birth, u.death});
    out.diag.push_back({proj.birth, proj.death});
  }
  return out;
}

Prepared prepare(const RotatedDiagram& d) {
  Prepared out;
  for (const auto& u : d.points) {
    const auto proj = axis_projection(u);
    out.pts.push_back({u.birth, u.persistence});
    out.diag.push_back({proj.birth, proj.persistence});
  }
  return out;
}

}  // namespace

double planar_norm(double dx, double dy, double q) {
  dx = std::abs(dx);
  dy = std::abs(dy);
  if (std::isinf(q)) return std::max(dx, dy);
  if (q == 2.0) return std::hypot(dx, dy);
  if (q == 1.0) return dx + dy;
  return std::pow(std::pow(dx, q) + std::pow(dy, q), 1.0 / q);
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("solve_assignment: cost is not n x n");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost[(row0 - 1) * n + (col - 1)] - u[row0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, double q) {
  check_exponents(p, q);
  const auto pa = prepare(a);
  const auto pb = prepare(b);
  return matched_distance(pa.pts, pa.diag, pb.pts, pb.diag, p, q);
}

double wasserstein(const RotatedDiagram& a, const RotatedDiagram& b, double p, double q) {
  check_exponents(p, q);
  const auto pa = prepare(a);
  const auto pb = prepare(b);
  return matched_distance(pa.pts, pa.diag, pb.pts, pb.diag, p, q);
}

double wasserstein_bruteforce(const PersistenceDiagram& a, const PersistenceDiagram& b, double p,
                              double q) {
  check_exponents(p, q);
  const auto pa = prepare(a);
  const auto pb = prepare(b);
  return enumerate(pa.pts, pa.diag, pb.pts, pb.diag, p, q);
}

double wasserstein_bruteforce(const RotatedDiagram& a, const RotatedDiagram& b, double p,
                              double q) {
  check_exponents(p, q);
  const auto pa = prepare(a);
  const auto pb = prepare(b);
  return enumerate(pa.pts, pa.diag, pb.pts, pb.diag, p, q);
}

}  // namespace xpert
