#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ssep/errors.hpp"
#include "ssep/rng.hpp"
#include "ssep/tree.hpp"

namespace ssep {
namespace {

VertexAddr V(std::vector<std::uint8_t> w, int d = 2) { return VertexAddr(std::move(w), d); }

VertexAddr random_vertex(RngStream& rng, int d, int max_depth) {
  const auto depth = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_depth) + 1));
  std::vector<std::uint8_t> w;
  for (int i = 0; i < depth; ++i) w.push_back(static_cast<std::uint8_t>(rng.below(i == 0 ? d + 1 : d)));
  return VertexAddr(w, d);
}

TEST(VertexAddr, ValidatesWords) {
  EXPECT_NO_THROW(V({2}));
  EXPECT_THROW(V({3}), ValidationError);
  EXPECT_NO_THROW(V({2, 1}));
  EXPECT_THROW(V({2, 2}), ValidationError);
  EXPECT_THROW(VertexAddr::parse("0.x", 2), ValidationError);
}

TEST(VertexAddr, DottedRoundTrip) {
  EXPECT_EQ(VertexAddr::parse("", 2), VertexAddr::root());
  EXPECT_EQ(VertexAddr::parse("0.1.0", 2), V({0, 1, 0}));
  EXPECT_EQ(V({0, 1, 0}).to_string(), "0.1.0");
  EXPECT_EQ(VertexAddr::root().to_string(), "");
}

TEST(Neighbors, RootHasAllChildren) {
  const auto n = neighbors(VertexAddr::root(), 2);
  ASSERT_EQ(n.size(), 3U);
  EXPECT_EQ(n[0], V({0}));
  EXPECT_EQ(n[1], V({1}));
  EXPECT_EQ(n[2], V({2}));
}

TEST(Neighbors, FatherAndChildren) {
  auto n = neighbors(V({0, 1}), 2);
  std::sort(n.begin(), n.end());
  const std::vector<VertexAddr> want{V({0}), V({0, 1, 0}), V({0, 1, 1})};
  EXPECT_EQ(n, want);
}

TEST(Neighbors, DegreePlusOneEverywhere) {
  RngStream rng(1, 0);
  for (int d : {2, 3, 4}) {
    for (int i = 0; i < 200; ++i) {
      const auto v = random_vertex(rng, d, 6);
      EXPECT_EQ(neighbors(v, d).size(), static_cast<std::size_t>(d + 1));
      if (!v.is_root()) {
        const auto up = neighbors(v.father(), d);
        EXPECT_NE(std::find(up.begin(), up.end(), v), up.end());
        const auto own = neighbors(v, d);
        EXPECT_NE(std::find(own.begin(), own.end(), v.father()), own.end());
      }
    }
  }
}

TEST(Distance, Examples) {
  EXPECT_EQ(distance(VertexAddr::root(), VertexAddr::root()), 0U);
  EXPECT_EQ(distance(V({0}), V({1})), 2U);
  EXPECT_EQ(distance(V({0, 1}), V({0})), 1U);
  EXPECT_TRUE(adjacent(V({0, 1}), V({0})));
  EXPECT_FALSE(adjacent(V({0}), V({1})));
}

TEST(Distance, IsAMetric) {
  RngStream rng(2, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_vertex(rng, 3, 5), b = random_vertex(rng, 3, 5), c = random_vertex(rng, 3, 5);
    EXPECT_EQ(distance(a, b), distance(b, a));
    EXPECT_EQ(distance(a, b) == 0, a == b);
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c));
  }
}

TEST(Ball, SmallCounts) {
  const auto b21 = build_ball(2, 1);
  EXPECT_EQ(b21.vertex_count(), 4U);
  EXPECT_EQ(b21.edge_count(), 3U);
  const auto b22 = build_ball(2, 2);
  EXPECT_EQ(b22.vertex_count(), 10U);
  EXPECT_EQ(b22.edge_count(), 9U);
  const auto b32 = build_ball(3, 2);
  EXPECT_EQ(b32.vertex_count(), 17U);
  EXPECT_EQ(b32.edge_count(), 16U);
}

TEST(Ball, MatchesGeometricSum) {
  for (int d : {2, 3, 4}) {
    for (int r = 1; r <= 6; ++r) {
      const auto ball = build_ball(d, r);
      // 1 + (d+1) + (d+1)d + ... + (d+1)d^{R-1}
      std::size_t want = 1, layer = static_cast<std::size_t>(d + 1);
      for (int k = 1; k <= r; ++k, layer *= static_cast<std::size_t>(d)) want += layer;
      EXPECT_EQ(ball.vertex_count(), want) << d << "," << r;
      EXPECT_EQ(ball_vertex_count(d, r), want);
      EXPECT_EQ(ball.edge_count(), want - 1);
      for (std::size_t v = 0; v < ball.vertex_count(); ++v) {
        const auto depth = ball.vertex(v).depth();
        if (static_cast<int>(depth) < r) {
          EXPECT_EQ(ball.incident(v).size(), static_cast<std::size_t>(d + 1));
        }
        EXPECT_LE(static_cast<int>(depth), r);
        EXPECT_EQ(ball.index_of(ball.vertex(v)), v);
      }
    }
  }
}

TEST(Ball, BreadthFirstOrderAndEdges) {
  const auto ball = build_ball(2, 2);
  for (std::size_t v = 1; v < ball.vertex_count(); ++v) {
    EXPECT_FALSE(ball.vertex(v) < ball.vertex(v - 1));
    EXPECT_EQ(ball.edge_child(v - 1), v);
    EXPECT_EQ(ball.vertex(ball.edge_parent(v - 1)), ball.vertex(v).father());
    EXPECT_EQ(ball.edge_index(ball.edges()[v - 1]), v - 1);
  }
  EXPECT_THROW(ball.index_of(V({0, 0, 0})), ValidationError);
}

TEST(Ball, CapGuard) {
  EXPECT_THROW(build_ball(4, 12, 1000), CapExceeded);
  EXPECT_THROW(build_ball(1, 2), ValidationError);
}

TEST(TruncationRadius, Formula) {
  EXPECT_EQ(truncation_radius(2, 1, 0, 3), 1);
  // ceil(2 + 3 + 3 sqrt(3)) = ceil(10.196...)
  EXPECT_EQ(truncation_radius(2, 2, 1, 3), 11);
  EXPECT_EQ(truncation_radius(2, 2, 1, 3), static_cast<int>(std::ceil(2 + 3 + 3 * std::sqrt(3.0))));
  int prev = 0;
  for (double t = 0; t < 60; t += 0.7) {
    const int r = truncation_radius(3, 1, t, 2.5);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

}  // namespace
}  // namespace ssep
