#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "xpert/graph.hpp"
#include "xpert/ppd.hpp"
#include "xpert/ppd_io.hpp"
#include "xpert/stability.hpp"
#include "xpert/wasserstein.hpp"

using namespace xpert;

namespace {

RotatedDiagram rd(std::vector<RotatedPoint> pts) { return {std::move(pts)}; }
PersistenceDiagram pd(std::vector<DiagramPoint> pts) { return {std::move(pts), 0}; }

nlohmann::json golden(const std::string& name) {
  std::ifstream in(std::string(XPERT_GOLDEN_DIR) + "/" + name);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(InstanceNormalize, Examples) {
  const auto a = instance_normalize(rd({{0, 3}, {0, 1}}));
  EXPECT_EQ(canonical(a.diagram), (std::vector<RotatedPoint>{{0, 1.0 / 3}, {0, 1}}));
  EXPECT_EQ(a.b_max, 1.0);
  EXPECT_EQ(a.p_max, 3.0);

  const auto e = instance_normalize(rd({}));
  EXPECT_TRUE(e.diagram.empty());
  EXPECT_EQ(e.b_max, 1.0);
  EXPECT_EQ(e.p_max, 1.0);

  const auto b = instance_normalize(rd({{2, 4}, {1, 1}}));
  EXPECT_EQ(canonical(b.diagram), (std::vector<RotatedPoint>{{0.5, 0.25}, {1, 1}}));

  const auto z = instance_normalize(rd({{2, 0}}));
  EXPECT_EQ(z.p_max, 1.0);
}

TEST(Project, Examples) {
  EXPECT_EQ(canonical(project(rd({{0.3, 0.7}}), 0.5)), (std::vector<RotatedPoint>{{0.25, 0.75}}));
  EXPECT_EQ(canonical(project(rd({{0.25, 0.25}}), 0.5)), (std::vector<RotatedPoint>{{0.25, 0.25}}));
  EXPECT_EQ(canonical(project(rd({{1.0, 0.0}}), 0.5)), (std::vector<RotatedPoint>{{1.25, 0.25}}));
  EXPECT_THROW(project(rd({{0, 0}}), 0.0), std::invalid_argument);
  EXPECT_THROW(project(rd({{-0.1, 0}}), 0.5), std::invalid_argument);
}

TEST(Pixelize, Examples) {
  EXPECT_TRUE(pixelize(pd({}), 50).is_zero());

  const auto one = pixelize(pd({{1, 3}}), 50);
  EXPECT_EQ(one.at(49, 49), 1u);
  EXPECT_EQ(one.total(), 1u);

  const auto two = pixelize(pd({{0, 1}, {0, 2}}), 2);
  EXPECT_EQ(two.at(0, 1), 2u);
  EXPECT_EQ(two.total(), 2u);
}

TEST(Pixelize, MatchesGoldenFile) {
  const auto p = pixelize(pd({{0, 1}, {0, 2}, {1, 3}}), 4);
  EXPECT_EQ(nlohmann::json(p).dump(), golden("ppd_h4.json").dump());
  EXPECT_EQ(golden("ppd_h4.json").get<Ppd>(), p);
}

TEST(PixelizeExtended, Examples) {
  const auto empty = pixelize_extended({}, 8);
  for (const auto& c : empty.channels) EXPECT_TRUE(c.is_zero());
  EXPECT_EQ(empty.b_max, 1.0);
  EXPECT_EQ(empty.p_max, 1.0);

  ExtendedPersistenceDiagram e;
  e.ext0_plus.points = {{0, 1}};
  const auto x = pixelize_extended(e, 8);
  EXPECT_TRUE(x.channels[0].is_zero());
  EXPECT_TRUE(x.channels[1].is_zero());
  EXPECT_TRUE(x.channels[3].is_zero());
  EXPECT_EQ(x.channels[2].at(0, 7), 1u);
}

TEST(PixelizeExtended, TriangleGraphEndToEnd) {
  const auto e = extended_persistence(Graph(3, {{0, 1}, {0, 2}, {1, 2}}), {0, 1, 2});
  const auto x = pixelize_extended(e, 4);
  EXPECT_EQ(x.b_max, 1.0);
  EXPECT_EQ(x.p_max, 2.0);
  EXPECT_EQ(nlohmann::json(x).dump(), golden("extended_ppd_triangle_h4.json").dump());
  EXPECT_EQ(golden("extended_ppd_triangle_h4.json").get<ExtendedPpd>(), x);
}

TEST(PixelizeExtended, SharesOneScaleAcrossChannels) {
  ExtendedPersistenceDiagram e;
  e.ord0.points = {{0, 4}};      // rotated (0, 4)
  e.ext0_plus.points = {{2, 3}};  // rotated (2, 1)
  const auto x = pixelize_extended(e, 4);
  EXPECT_EQ(x.b_max, 2.0);
  EXPECT_EQ(x.p_max, 4.0);
  EXPECT_EQ(x.channels[0].at(0, 3), 1u);
  EXPECT_EQ(x.channels[2].at(3, 1), 1u);
}

TEST(Patchify, Examples) {
  ExtendedPpd zero;
  for (auto& c : zero.channels) c = Ppd(50);
  EXPECT_TRUE(patchify(zero, 5).patches.empty());

  ExtendedPpd full = zero;
  for (auto& c : full.channels) {
    for (int r = 0; r < 50; ++r) {
      for (int q = 0; q < 50; ++q) c.at(r, q) = 1;
    }
  }
  EXPECT_EQ(patchify(full, 5).patches.size(), 100u);

  ExtendedPpd one = zero;
  one.channels[0].at(0, 0) = 1;
  const auto s = patchify(one, 5);
  ASSERT_EQ(s.patches.size(), 1u);
  EXPECT_EQ(s.patches[0].grid_row, 0);
  EXPECT_EQ(s.patches[0].grid_col, 0);
  ASSERT_EQ(s.patches[0].values.size(), 100u);
  EXPECT_EQ(s.patches[0].values[0], 1.0);
  EXPECT_EQ(std::count(s.patches[0].values.begin(), s.patches[0].values.end(), 0.0), 99);

  EXPECT_THROW(patchify(zero, 7), std::invalid_argument);
}

TEST(Patchify, OrderAndLayout) {
  std::array<Ppd, 2> ch{Ppd(4), Ppd(4)};
  ch[1].at(3, 2) = 5;  // patch (1, 1), local (1, 0)
  ch[0].at(0, 3) = 2;  // patch (0, 1), local (0, 1)
  const auto s = patchify(ch, 2);
  ASSERT_EQ(s.patches.size(), 2u);
  EXPECT_EQ(s.patches[0].grid_col, 1);
  EXPECT_EQ(s.patches[0].grid_row, 0);
  EXPECT_EQ(s.patches[0].values, (std::vector<double>{0, 2, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(s.patches[1].values, (std::vector<double>{0, 0, 0, 0, 0, 0, 5, 0}));
}

TEST(PpdProperties, CountPermutationAndScale) {
  std::mt19937_64 rng(4);
  for (int c = 0; c < 500; ++c) {
    auto d = random_diagram(rng);
    const auto p = pixelize(d, 50);
    EXPECT_EQ(p.total(), d.size());
    std::shuffle(d.points.begin(), d.points.end(), rng);
    EXPECT_EQ(pixelize(d, 50), p);
    // Power-of-two factors keep normalized coordinates bit-identical.
    auto twice = d;
    for (auto& q : twice.points) {
      q.birth *= 4;
      q.death *= 4;
    }
    EXPECT_EQ(pixelize(twice, 50), p);
  }
}

TEST(PpdProperties, ScaleInvarianceForArbitraryFactors) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int c = 0; c < 500; ++c) {
    const auto d = random_diagram(rng);
    const double k = scale(rng);
    auto s = d;
    for (auto& q : s.points) {
      q.birth *= k;
      q.death *= k;
    }
    EXPECT_EQ(pixelize(s, 50), pixelize(d, 50)) << "case " << c << " factor " << k;
  }
}

TEST(PpdProperties, ProjectionCostBound) {
  const auto r = check_projection_cost(200, {0.1, 0.01}, 31);
  EXPECT_EQ(r.cases, 400u);
  EXPECT_EQ(r.violations, 0u) << "worst ratio " << r.worst_ratio;
}

TEST(PpdProperties, ProjectedDiagramsStayStable) {
  const auto r = check_projected_stability(200, 41);
  EXPECT_EQ(r.cases, 200u);
  EXPECT_EQ(r.violations, 0u) << "worst ratio " << r.worst_ratio;
}

TEST(PpdProperties, ProjectionIsIdempotent) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 200; ++c) {
    const auto d = rotate(random_diagram(rng));
    for (double delta : {0.5, 0.1, 0.03}) {
      const auto once = project(d, delta);
      EXPECT_EQ(canonical(project(once, delta)), canonical(once));
    }
  }
}
