#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "xpert/graph.hpp"
#include "xpert/linalg.hpp"

using namespace xpert;
using xpert::testing::count_components;
using xpert::testing::random_function;
using xpert::testing::random_graph;

namespace {

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

Graph triangle() { return Graph(3, {{0, 1}, {0, 2}, {1, 2}}); }

void expect_matrix(const SquareMatrix& m, const std::vector<std::vector<double>>& want) {
  ASSERT_EQ(m.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(m(i, j), want[i][j], 1e-15);
  }
}

std::vector<DiagramPoint> shifted(std::vector<DiagramPoint> pts, double c) {
  for (auto& p : pts) {
    p.birth += c;
    p.death += c;
  }
  return pts;
}

}  // namespace

TEST(Graph, ValidatesEdges) {
  EXPECT_THROW(Graph(2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);
  const Graph g(3, {{2, 1}, {1, 0}});
  EXPECT_EQ(g.edges(), (Edges{{0, 1}, {1, 2}}));
  EXPECT_EQ(g.num_components(), 1u);
  EXPECT_EQ(Graph(4, {{0, 1}}).num_components(), 3u);
}

TEST(ParseGraph, ReadsEdgeList) {
  const auto g = parse_graph("3 2\n0 1\n1 2\n", "mem");
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(ParseGraph, ReportsOffendingLine) {
  try {
    parse_graph("2 1\n0 2\n", "g.txt");
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("g.txt"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_graph("2 2\n0 1\n", "short"), std::invalid_argument);
  EXPECT_THROW(parse_graph("2 1\n0 x\n", "bad"), std::invalid_argument);
}

TEST(NormalizedLaplacian, Examples) {
  expect_matrix(normalized_laplacian(Graph(2, {{0, 1}})), {{1, -1}, {-1, 1}});
  expect_matrix(normalized_laplacian(Graph(3, {})), {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const double s = 1.0 / std::sqrt(2.0);
  expect_matrix(normalized_laplacian(Graph(3, {{0, 1}, {1, 2}})),
                {{1, -s, 0}, {-s, 1, -s}, {0, -s, 1}});
}

TEST(SymmetricEigen, Examples) {
  EXPECT_EQ(symmetric_eigen(SquareMatrix::identity(4)).values, (std::vector<double>(4, 1.0)));
  SquareMatrix k2(2);
  k2(0, 0) = k2(1, 1) = 1;
  k2(0, 1) = k2(1, 0) = -1;
  const auto e = symmetric_eigen(k2);
  EXPECT_NEAR(e.values[0], 0.0, 1e-12);
  EXPECT_NEAR(e.values[1], 2.0, 1e-12);
  SquareMatrix d(3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  EXPECT_EQ(symmetric_eigen(d).values, (std::vector<double>{1, 2, 3}));
}

TEST(SymmetricEigen, RejectsAsymmetricInput) {
  SquareMatrix m(2);
  m(0, 1) = 1e-6;
  EXPECT_THROW(symmetric_eigen(m), std::invalid_argument);
}

TEST(SymmetricEigen, ResidualAndOrthonormality) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int c = 0; c < 20; ++c) {
    const std::size_t size = 1 + rng() % 25;
    SquareMatrix m(size);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i; j < size; ++j) m(i, j) = m(j, i) = n(rng);
    }
    const auto e = symmetric_eigen(m);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    for (std::size_t k = 0; k < size; ++k) {
      for (std::size_t i = 0; i < size; ++i) {
        double mv = 0.0;
        for (std::size_t j = 0; j < size; ++j) mv += m(i, j) * e.vectors(j, k);
        EXPECT_NEAR(mv, e.values[k] * e.vectors(i, k), 1e-8);
      }
      for (std::size_t l = 0; l < size; ++l) {
        double dot = 0.0;
        for (std::size_t i = 0; i < size; ++i) dot += e.vectors(i, k) * e.vectors(i, l);
        EXPECT_NEAR(dot, k == l ? 1.0 : 0.0, 1e-8);
      }
    }
  }
}

TEST(Hks, Examples) {
  const auto k2 = hks(Graph(2, {{0, 1}}), 1.0);
  EXPECT_NEAR(k2[0], 0.5 * (1 + std::exp(-2.0)), 1e-12);
  EXPECT_NEAR(k2[1], k2[0], 1e-12);
  for (double v : hks(Graph(4, {}), 0.7)) EXPECT_NEAR(v, std::exp(-0.7), 1e-12);
  const auto cycle = hks(Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}), 1.0);
  for (double v : cycle) EXPECT_NEAR(v, cycle[0], 1e-12);
  EXPECT_THROW(hks(Graph(2, {}), 0.0), std::invalid_argument);
}

TEST(Hks, PositiveAndInvariantUnderRelabeling) {
  std::mt19937_64 rng(9);
  for (int c = 0; c < 30; ++c) {
    const auto g = random_graph(rng, 20, 0.25);
    const std::size_t n = g.num_vertices();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Edges relabeled;
    for (auto [a, b] : g.edges()) relabeled.emplace_back(perm[a], perm[b]);
    const auto h = hks(g, 1.0);
    const auto hp = hks(Graph(n, relabeled), 1.0);
    for (std::size_t v = 0; v < n; ++v) {
      EXPECT_GT(h[v], 0.0);
      EXPECT_NEAR(hp[perm[v]], h[v], 1e-10);
    }
  }
}

TEST(SublevelFiltration, Examples) {
  const auto one = sublevel_filtration(Graph(1, {}), {0.7});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].value, 0.7);

  const auto edge = sublevel_filtration(Graph(2, {{0, 1}}), {0, 1});
  ASSERT_EQ(edge.size(), 3u);
  EXPECT_EQ(edge[0].simplex, (std::vector<std::size_t>{0}));
  EXPECT_EQ(edge[1].simplex, (std::vector<std::size_t>{1}));
  EXPECT_EQ(edge[2].simplex, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(edge[2].value, 1.0);

  const auto tri = sublevel_filtration(triangle(), {0, 1, 2});
  std::vector<double> values;
  for (const auto& s : tri) values.push_back(s.value);
  EXPECT_EQ(values, (std::vector<double>{0, 1, 1, 2, 2, 2}));
  EXPECT_EQ(tri[2].simplex, (std::vector<std::size_t>{0, 1}));
}

TEST(ExtendedFiltration, Examples) {
  const auto edge = extended_filtration(Graph(2, {{0, 1}}), {0, 1});
  ASSERT_EQ(edge.size(), 6u);
  EXPECT_EQ(edge[3].pass, Pass::descending);
  EXPECT_EQ(edge[3].simplex, (std::vector<std::size_t>{1}));
  EXPECT_EQ(edge[3].value, 1.0);
  EXPECT_EQ(edge[4].simplex, (std::vector<std::size_t>{0}));
  EXPECT_EQ(edge[5].simplex, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(edge[5].value, 0.0);

  const auto single = extended_filtration(Graph(1, {}), {0.3});
  ASSERT_EQ(single.size(), 2u);
  EXPECT_EQ(single[0].pass, Pass::ascending);
  EXPECT_EQ(single[1].pass, Pass::descending);
  EXPECT_EQ(single[1].value, 0.3);

  const auto star = extended_filtration(Graph(4, {{0, 1}, {0, 2}, {0, 3}}), {0, 1, 1, 1});
  ASSERT_EQ(star.size(), 14u);
  for (std::size_t i = 7; i < 10; ++i) {
    EXPECT_EQ(star[i].simplex.size(), 1u);
    EXPECT_NE(star[i].simplex[0], 0u);
  }
}

TEST(ExtendedPersistence, SingleEdge) {
  const auto e = extended_persistence(Graph(2, {{0, 1}}), {0, 1});
  EXPECT_TRUE(e.ord0.empty());
  EXPECT_TRUE(e.rel1.empty());
  EXPECT_EQ(canonical(e.ext0_plus), (std::vector<DiagramPoint>{{0, 1}}));
  EXPECT_TRUE(e.ext1_minus.empty());
}

TEST(ExtendedPersistence, Triangle) {
  // The loop is born when it closes at 2 in the ascending pass and dies once
  // the whole cycle is in the superlevel set, at the minimum 0.
  const auto e = extended_persistence(triangle(), {0, 1, 2});
  EXPECT_TRUE(e.ord0.empty());
  EXPECT_TRUE(e.rel1.empty());
  EXPECT_EQ(canonical(e.ext0_plus), (std::vector<DiagramPoint>{{0, 2}}));
  EXPECT_EQ(canonical(e.ext1_minus), (std::vector<DiagramPoint>{{2, 0}}));
}

TEST(ExtendedPersistence, TwoDisjointEdges) {
  const auto e = extended_persistence(Graph(4, {{0, 1}, {2, 3}}), {0, 1, 2, 3});
  EXPECT_EQ(canonical(e.ext0_plus), (std::vector<DiagramPoint>{{0, 1}, {2, 3}}));
}

TEST(ExtendedPersistence, RelativeLoopOfAPeak) {
  // Vertex 3 sits on top of the loop 1-2-3 hanging below a global max 4:
  // minima 0 and 1, a saddle at 2. The upward branch to vertex 4 makes 3 a
  // non-extremal relative class.
  const Graph g(5, {{0, 1}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
  const auto e = extended_persistence(g, {0, 1, 2, 3, 4});
  EXPECT_EQ(e.ext0_plus.size(), 1u);
  EXPECT_EQ(e.ext1_minus.size(), 1u);
  for (const auto& p : e.rel1.points) EXPECT_GE(p.birth, p.death);
}

TEST(ExtendedPersistenceProperties, BettiIdentitiesAndGeometry) {
  std::mt19937_64 rng(21);
  for (int c = 0; c < 100; ++c) {
    const auto g = random_graph(rng, 30, 0.05 + 0.3 * (c % 4) / 3.0);
    const auto f = random_function(rng, g.num_vertices(), c % 2 ? 6 : 0);
    const auto e = extended_persistence(g, f);
    const std::size_t comps = count_components(g.num_vertices(), g.edges());
    EXPECT_EQ(e.ext0_plus.size(), comps);
    EXPECT_EQ(e.ext1_minus.size(), g.edges().size() + comps - g.num_vertices());
    for (const auto& p : e.ord0.points) EXPECT_GE(p.death, p.birth);
    for (const auto& p : e.ext0_plus.points) EXPECT_GE(p.death, p.birth);
    for (const auto& p : e.rel1.points) EXPECT_GE(p.birth, p.death);
    for (const auto& p : e.ext1_minus.points) EXPECT_GE(p.birth, p.death);
    EXPECT_EQ(canonical(e.ord0), xpert::testing::sublevel_zero_dim(g, f));
  }
}

TEST(ExtendedPersistenceProperties, ShiftEquivariance) {
  std::mt19937_64 rng(33);
  for (int c = 0; c < 50; ++c) {
    const auto g = random_graph(rng, 20, 0.2);
    const auto f = random_function(rng, g.num_vertices(), 16);
    const double shift = static_cast<double>(static_cast<int>(rng() % 7) - 3);
    auto fs = f;
    for (auto& v : fs) v += shift;
    const auto a = extended_persistence(g, f);
    const auto b = extended_persistence(g, fs);
    EXPECT_EQ(canonical(b.ord0), shifted(canonical(a.ord0), shift));
    EXPECT_EQ(canonical(b.rel1), shifted(canonical(a.rel1), shift));
    EXPECT_EQ(canonical(b.ext0_plus), shifted(canonical(a.ext0_plus), shift));
    EXPECT_EQ(canonical(b.ext1_minus), shifted(canonical(a.ext1_minus), shift));
  }
}
