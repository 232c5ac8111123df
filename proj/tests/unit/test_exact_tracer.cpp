#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"
#include "splitrt/bvh.hpp"
#include "splitrt/errors.hpp"

using namespace splitrt;

namespace {

RayQuery query(vec3 o, vec3 d, double a, double b, QueryFlag f = QueryFlag::ClosestHit) {
  return {o, normalize(d), a, b, f};
}

TriangleMesh two_walls() { return oracle::concat({oracle::wall_z(1, 5), oracle::wall_z(2, 5)}); }

// Walks the tree, checking containment and counting leaf references per triangle.
void check_structure(const Bvh& bvh, std::size_t triangle_count) {
  auto seen = std::vector<int>(triangle_count, 0);
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t index) {
    auto& node = bvh.nodes[index];
    if (node.is_leaf()) {
      EXPECT_LE(node.count, static_cast<std::uint32_t>(kBvhMaxLeafSize));
      for (auto s = node.first; s < node.first + node.count; s++) {
        EXPECT_TRUE(node.box.contains(triangle_bounds(bvh.triangles[s])));
        seen[bvh.triangle_order[s]]++;
      }
      return;
    }
    for (auto c : {node.first, node.first + 1}) {
      EXPECT_TRUE(node.box.contains(bvh.nodes[c].box));
      walk(c);
    }
  };
  walk(0);
  for (auto n : seen) EXPECT_EQ(n, 1);
}

}  // namespace

TEST(RayTriangle, Examples) {
  auto tri = Triangle{vec3{-1, -1, 0}, vec3{1, -1, 0}, vec3{0, 1, 0}};
  auto hit = ray_triangle({0, 0, -1}, {0, 0, 1}, tri);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 1.0);
  auto moved = tri;
  for (auto& v : moved) v.x += 10;
  EXPECT_FALSE(ray_triangle({0, 0, -1}, {0, 0, 1}, moved));
  EXPECT_FALSE(ray_triangle({0, 0, 1}, {0, 0, 1}, tri));  // behind the origin
}

TEST(RayTriangle, AgreesWithPlaneOracle) {
  auto rng  = std::mt19937_64{11};
  auto box  = Aabb{{-1, -1, -1}, {1, 1, 1}};
  int  hits = 0;
  for (int i = 0; i < 20000; i++) {
    auto tri = Triangle{oracle::random_point(rng, box), oracle::random_point(rng, box),
        oracle::random_point(rng, box)};
    auto o   = oracle::random_point(rng, {{-3, -3, -3}, {3, 3, 3}});
    // Aim at a point near the triangle so that roughly half the rays hit.
    auto target = (tri[0] + tri[1] + tri[2]) / 3.0 + oracle::random_unit(rng) * 0.3;
    auto d      = normalize(target - o);
    auto got    = ray_triangle(o, d, tri);
    auto want   = oracle::ray_triangle(o, d, tri);
    ASSERT_EQ(got.has_value(), want.has_value()) << "pair " << i;
    if (!got) continue;
    hits++;
    EXPECT_NEAR(got->t, *want, 1e-9 * std::max(1.0, *want));
    EXPECT_GE(got->u, -1e-12);
    EXPECT_GE(got->v, -1e-12);
    EXPECT_LE(got->u + got->v, 1 + 1e-12);
    auto n = triangle_normal(tri);
    EXPECT_NEAR(dot(o + d * got->t - tri[0], n), 0, 1e-6);
  }
  EXPECT_GT(hits, 2000);
}

TEST(BuildBvh, SingleTriangle) {
  auto mesh = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  auto bvh  = build_bvh(mesh);
  ASSERT_EQ(bvh.nodes.size(), 1u);
  EXPECT_TRUE(bvh.nodes[0].is_leaf());
  EXPECT_EQ(bvh.bounds(), triangle_bounds(mesh.triangle(0)));
}

TEST(BuildBvh, CubeStructure) {
  auto mesh = oracle::box_mesh({0, 0, 0}, {1, 1, 1});
  ASSERT_EQ(mesh.triangle_count(), 12u);
  check_structure(build_bvh(mesh), 12);
}

TEST(BuildBvh, EmptyMeshThrows) { EXPECT_THROW(build_bvh(TriangleMesh{}), EmptyMesh); }

TEST(BuildBvh, DeterministicForFixedMesh) {
  auto rng  = std::mt19937_64{3};
  auto mesh = oracle::random_soup(rng, 2000, {{0, 0, 0}, {10, 10, 10}}, 0.3);
  auto a = build_bvh(mesh), b = build_bvh(mesh);
  EXPECT_EQ(a.triangle_order, b.triangle_order);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); i++) {
    EXPECT_EQ(a.nodes[i].box, b.nodes[i].box);
    EXPECT_EQ(a.nodes[i].first, b.nodes[i].first);
    EXPECT_EQ(a.nodes[i].count, b.nodes[i].count);
  }
  check_structure(a, mesh.triangle_count());
}

TEST(IntersectClosest, TwoWalls) {
  auto bvh   = build_bvh(two_walls());
  auto stats = WorkStats{};
  auto hit   = intersect_closest(bvh, query({0, 0, 0}, {0, 0, 1}, 0, 10), stats);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 1);
  EXPECT_EQ(hit->source, TracerKind::Exact);
  EXPECT_NEAR(hit->normal.z, -1, 1e-12);  // faces the origin
  hit = intersect_closest(bvh, query({0, 0, 0}, {0, 0, 1}, 1.5, 10), stats);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 2);
  // Closed interval: a hit exactly at either end counts.
  EXPECT_TRUE(intersect_closest(bvh, query({0, 0, 0}, {0, 0, 1}, 0, 1), stats));
  EXPECT_TRUE(intersect_closest(bvh, query({0, 0, 0}, {0, 0, 1}, 2, 10), stats));
  EXPECT_FALSE(intersect_closest(bvh, query({0, 0, 0}, {0, 0, 1}, 2.5, 10), stats));
}

TEST(IntersectAny, TwoWalls) {
  auto bvh   = build_bvh(two_walls());
  auto stats = WorkStats{};
  EXPECT_TRUE(intersect_any(bvh, query({0, 0, 0}, {0, 0, 1}, 0, 10, QueryFlag::AnyHit), stats));
  EXPECT_FALSE(intersect_any(bvh, query({0, 0, 0}, {0, 0, 1}, 3, 10, QueryFlag::AnyHit), stats));
}

TEST(IntersectClosest, MatchesBruteForceOnRandomSoup) {
  auto rng   = std::mt19937_64{42};
  auto box   = Aabb{{-5, -5, -5}, {5, 5, 5}};
  auto mesh  = oracle::random_soup(rng, 10000, box, 0.4);
  auto bvh   = build_bvh(mesh);
  auto u     = std::uniform_real_distribution<double>{0, 1};
  int  hits  = 0;
  for (int i = 0; i < 1000; i++) {
    auto o = oracle::random_point(rng, {{-7, -7, -7}, {7, 7, 7}});
    auto d = oracle::random_unit(rng);
    auto a = 4 * u(rng), b = a + 12 * u(rng);
    auto stats = WorkStats{};
    auto got   = intersect_closest(bvh, query(o, d, a, b), stats);
    auto want  = oracle::closest(mesh, o, d, a, b);
    ASSERT_EQ(got.has_value(), want.has_value()) << "ray " << i;
    EXPECT_LE(stats.triangle_tests, mesh.triangle_count());
    auto any = intersect_any(bvh, query(o, d, a, b, QueryFlag::AnyHit), stats);
    EXPECT_EQ(any.has_value(), got.has_value());
    if (!got) continue;
    hits++;
    EXPECT_LE(std::abs(got->t - *want), 1e-9 * *want);
    EXPECT_GE(got->t, a);
    EXPECT_LE(got->t, b);
    EXPECT_NEAR(length(got->normal), 1, 1e-6);
    EXPECT_LT(distance(got->point, o + d * got->t), 1e-6 * (1 + got->t));
    ASSERT_TRUE(got->primitive);
    EXPECT_TRUE(oracle::ray_triangle(o, d, mesh.triangle(*got->primitive)));
    EXPECT_GE(any->t, a);
    EXPECT_LE(any->t, b);
  }
  EXPECT_GT(hits, 100);
}

TEST(IntersectClosest, ShrinkingIntervalNeverAddsHits) {
  auto rng  = std::mt19937_64{9};
  auto mesh = oracle::random_soup(rng, 3000, {{-4, -4, -4}, {4, 4, 4}}, 0.4);
  auto bvh  = build_bvh(mesh);
  auto u    = std::uniform_real_distribution<double>{0, 1};
  for (int i = 0; i < 500; i++) {
    auto o = oracle::random_point(rng, {{-5, -5, -5}, {5, 5, 5}});
    auto d = oracle::random_unit(rng);
    auto stats = WorkStats{};
    auto outer = intersect_closest(bvh, query(o, d, 0, 12), stats);
    auto a = 6 * u(rng), b = a + 6 * u(rng);
    auto inner = intersect_closest(bvh, query(o, d, a, b), stats);
    if (inner) {
      ASSERT_TRUE(outer);
      EXPECT_LE(outer->t, inner->t);
    }
  }
}
