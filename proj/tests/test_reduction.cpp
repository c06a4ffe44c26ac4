#include <gtest/gtest.h>

#include <random>

#include "xpert/reduction.hpp"

using namespace xpert;

namespace {

// Filled triangle: v0 v1 v2, e01 e02 e12, t.
FilteredComplex filled_triangle() {
  return {{{}, {}, {}, {0, 1}, {0, 2}, {1, 2}, {3, 4, 5}}, {0, 0, 0, 1, 1, 1, 2}};
}

}  // namespace

TEST(Reduce, FilledTriangle) {
  const auto r = reduce(filled_triangle());
  EXPECT_EQ(r.pairs, (std::vector<IndexPair>{{1, 3}, {2, 4}, {5, 6}}));
  EXPECT_EQ(r.essential, (std::vector<std::size_t>{0}));
}

TEST(Reduce, HollowSquareKeepsItsLoop) {
  const FilteredComplex sq{{{}, {}, {}, {}, {0, 1}, {1, 2}, {2, 3}, {0, 3}}, {0, 0, 0, 0, 1, 1, 1, 1}};
  const auto r = reduce(sq);
  EXPECT_EQ(r.pairs, (std::vector<IndexPair>{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(r.essential, (std::vector<std::size_t>{0, 7}));
}

TEST(Reduce, RejectsBadFaceOrder) {
  EXPECT_THROW(reduce({{{}, {0, 2}, {}}, {0, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(validate_face_order({{{}, {}, {0}}, {0, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(validate_face_order({{{}, {}, {0, 1}, {0, 1}}, {0, 0, 1, 2}}), std::invalid_argument);
}

TEST(UnionFind, MatchesReductionOnRandomGraphs) {
  std::mt19937_64 rng(4);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + rng() % 12;
    FilteredComplex k;
    for (std::size_t v = 0; v < n; ++v) {
      k.boundary.push_back({});
      k.dims.push_back(0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng() % 3 == 0) {
          k.boundary.push_back({i, j});
          k.dims.push_back(1);
        }
      }
    }
    const auto full = reduce(k);
    std::vector<IndexPair> zero;
    for (const auto& p : full.pairs) {
      if (k.dims[p.birth] == 0) zero.push_back(p);
    }
    const auto uf = union_find_pairs(k);
    EXPECT_EQ(uf.pairs, zero);
    std::vector<std::size_t> vertex_essentials;
    for (auto e : full.essential) {
      if (k.dims[e] == 0) vertex_essentials.push_back(e);
    }
    EXPECT_EQ(uf.essential, vertex_essentials);
  }
}
