#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "splitrt/errors.hpp"
#include "splitrt/voxelizer.hpp"

using namespace splitrt;

TEST(TriangleBoxOverlap, Examples) {
  auto box = Aabb{{0, 0, 0}, {1, 1, 1}};
  EXPECT_TRUE(triangle_box_overlap({vec3{0.2, 0.2, 0.5}, {0.8, 0.2, 0.5}, {0.5, 0.8, 0.5}}, box));
  EXPECT_FALSE(triangle_box_overlap({vec3{1.1, 0, 0}, {2, 0, 0}, {1.5, 1, 1}}, box));
  // Touching a face counts for a closed box.
  EXPECT_TRUE(triangle_box_overlap({vec3{1, 0.2, 0.2}, {2, 0.2, 0.2}, {1, 0.8, 0.8}}, box));
  // Bounding boxes overlap but the plane passes beside the corner.
  EXPECT_FALSE(triangle_box_overlap({vec3{1.2, 0, 0}, {0, 1.2, 0}, {0, 0, 1.2}},
      Aabb{{0.5, 0.5, 0.5}, {1, 1, 1}}));
}

TEST(TriangleBoxOverlap, NeverMissesSampledOverlap) {
  auto rng       = std::mt19937_64{17};
  auto box       = Aabb{{0, 0, 0}, {1, 1, 1}};
  int  positives = 0;
  for (int i = 0; i < 3000; i++) {
    auto c   = oracle::random_point(rng, {{-0.5, -0.5, -0.5}, {1.5, 1.5, 1.5}});
    auto tri = Triangle{c + oracle::random_unit(rng) * 0.6, c + oracle::random_unit(rng) * 0.6,
        c + oracle::random_unit(rng) * 0.6};
    auto sat = triangle_box_overlap(tri, box);
    // One-sided oracle: sampling may miss thin overlaps but never invents one.
    if (oracle::sampled_overlap(tri, box, 140)) {
      positives++;
      EXPECT_TRUE(sat) << "pair " << i;
    }
  }
  EXPECT_GT(positives, 500);
}

TEST(Voxelize, QuadInsideOneSlab) {
  auto quad = make_quad({0, 0, 1.5}, {4, 0, 0}, {0, 4, 0}, 1, 1, {1, 1, 1});
  auto grid = voxelize(quad, {0, 0, 0}, 4, 1.0);
  EXPECT_EQ(grid.occupied_count(), 16u);
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
      for (int k = 0; k < 4; k++) EXPECT_EQ(grid.occupied(i, j, k), k == 1);
}

TEST(Voxelize, QuadOnCellBoundaryTouchesBothSlabs) {
  auto quad = make_quad({0, 0, 2}, {4, 0, 0}, {0, 4, 0}, 1, 1, {1, 1, 1});
  auto grid = voxelize(quad, {0, 0, 0}, 4, 1.0);
  EXPECT_EQ(grid.occupied_count(), 32u);
  for (int k = 0; k < 4; k++) EXPECT_EQ(grid.occupied(2, 2, k), k == 1 || k == 2);
}

TEST(Voxelize, MeshOutsideGridIsEmpty) {
  auto mesh = oracle::box_mesh({10, 10, 10}, {11, 11, 11});
  EXPECT_EQ(voxelize(mesh, {0, 0, 0}, 8, 0.5).occupied_count(), 0u);
  EXPECT_EQ(voxelize(TriangleMesh{}, {0, 0, 0}, 8, 0.5).occupied_count(), 0u);
}

TEST(Voxelize, CubeMatchesPerCellBruteForce) {
  auto mesh = oracle::box_mesh({0.5, 0.5, 0.5}, {1.5, 1.5, 1.5});
  auto grid = voxelize(mesh, {0, 0, 0}, 8, 0.25);
  for (int k = 0; k < 8; k++)
    for (int j = 0; j < 8; j++)
      for (int i = 0; i < 8; i++) {
        auto box  = Aabb{vec3{i * 0.25, j * 0.25, k * 0.25}, vec3{(i + 1) * 0.25, (j + 1) * 0.25, (k + 1) * 0.25}};
        bool want = false;
        for (std::size_t t = 0; t < mesh.triangle_count(); t++)
          want = want || triangle_box_overlap(mesh.triangle(t), box);
        EXPECT_EQ(grid.occupied(i, j, k), want) << i << "," << j << "," << k;
      }
}

TEST(Voxelize, RandomSoupMatchesBruteForceAndIsConservative) {
  auto rng  = std::mt19937_64{23};
  auto mesh = oracle::random_soup(rng, 60, {{0.3, 0.3, 0.3}, {2.7, 2.7, 2.7}}, 0.35);
  auto grid = voxelize(mesh, {0, 0, 0}, 12, 0.25);
  for (int k = 0; k < 12; k++)
    for (int j = 0; j < 12; j++)
      for (int i = 0; i < 12; i++) {
        auto box  = grid.cell_box(i, j, k);
        bool want = false;
        for (std::size_t t = 0; t < mesh.triangle_count() && !want; t++)
          want = triangle_box_overlap(mesh.triangle(t), box);
        ASSERT_EQ(grid.occupied(i, j, k), want);
      }
  // Every sampled surface point lies in an occupied cell.
  for (std::size_t t = 0; t < mesh.triangle_count(); t++) {
    auto tri = mesh.triangle(t);
    for (int s = 0; s < 50; s++) {
      auto u = std::uniform_real_distribution<double>{0, 1}(rng);
      auto v = std::uniform_real_distribution<double>{0, 1 - u}(rng);
      auto p = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
      auto i = std::min(11, static_cast<int>(std::floor(p.x / 0.25)));
      auto j = std::min(11, static_cast<int>(std::floor(p.y / 0.25)));
      auto k = std::min(11, static_cast<int>(std::floor(p.z / 0.25)));
      EXPECT_TRUE(grid.occupied(i, j, k));
    }
  }
}

TEST(Voxelize, DeterministicAndRefinementConsistent) {
  auto rng    = std::mt19937_64{29};
  auto mesh   = oracle::random_soup(rng, 40, {{0.5, 0.5, 0.5}, {3.5, 3.5, 3.5}}, 0.4);
  auto coarse = voxelize(mesh, {0, 0, 0}, 8, 0.5);
  EXPECT_EQ(coarse.bits, voxelize(mesh, {0, 0, 0}, 8, 0.5).bits);
  auto fine = voxelize(mesh, {0, 0, 0}, 16, 0.25);
  for (int k = 0; k < 8; k++)
    for (int j = 0; j < 8; j++)
      for (int i = 0; i < 8; i++) {
        if (!coarse.occupied(i, j, k)) continue;
        bool child = false;
        for (int c = 0; c < 8; c++)
          child = child || fine.occupied(2 * i + (c & 1), 2 * j + (c >> 1 & 1), 2 * k + (c >> 2));
        // A coarse cell only touched on its boundary has children touched on the same face.
        EXPECT_TRUE(child) << i << "," << j << "," << k;
      }
}

TEST(Voxelize, RegionMatchesFullGrid) {
  auto rng  = std::mt19937_64{31};
  auto mesh = oracle::random_soup(rng, 50, {{0, 0, 0}, {4, 4, 4}}, 0.5);
  auto full = voxelize(mesh, {0, 0, 0}, 16, 0.25);
  auto part = OccupancyGrid(16, vec3{0, 0, 0}, 0.25);
  voxelize_region(mesh, part, {0, 0, 0}, {16, 16, 8});
  voxelize_region(mesh, part, {0, 0, 8}, {16, 16, 16});
  EXPECT_EQ(part.bits, full.bits);
}

TEST(OccupancyGrid, RejectsBadSpec) {
  EXPECT_THROW(OccupancyGrid(1, vec3{}, 1.0), Error);
  EXPECT_THROW(OccupancyGrid(4, vec3{}, 0.0), Error);
}

TEST(OccupancyGrid, DebugDump) {
  auto grid = voxelize(oracle::box_mesh({0.2, 0.2, 0.2}, {0.8, 0.8, 0.8}), {0, 0, 0}, 4, 0.25);
  auto dir  = std::filesystem::temp_directory_path() / "splitrt_test_dump";
  std::filesystem::create_directories(dir);
  write_occupancy_dump(grid, dir / "grid");
  EXPECT_EQ(std::filesystem::file_size(dir / "grid.bits"), 64u / 8);  // one bit per cell
  EXPECT_TRUE(std::filesystem::exists(dir / "grid.json"));
}
