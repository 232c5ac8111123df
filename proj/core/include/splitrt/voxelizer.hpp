#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <filesystem>
#include <vector>

#include "splitrt/scene.hpp"

namespace splitrt {

// Cubic grid of occupancy flags. Cell (i, j, k) covers the closed box
// [origin + (i, j, k) * voxel_size, origin + (i + 1, j + 1, k + 1) * voxel_size].
// Lattice-anchored grids compute that box as (lattice_min + (i, j, k)) * voxel_size
// so that grids at different positions agree bit-for-bit on shared cells.
struct OccupancyGrid {
  int                       resolution = 0;
  vec3                      origin;
  double                    voxel_size = 0;
  std::optional<ivec3>      lattice_min;
  std::vector<std::uint8_t> bits;  // one flag per cell, x fastest

  OccupancyGrid() = default;
  OccupancyGrid(int resolution, vec3 origin, double voxel_size);
  OccupancyGrid(int resolution, ivec3 lattice_min, double voxel_size);

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(resolution) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(resolution) * k);
  }
  bool occupied(int i, int j, int k) const { return bits[index(i, j, k)] != 0; }
  void set(int i, int j, int k) { bits[index(i, j, k)] = 1; }
  Aabb cell_box(int i, int j, int k) const;
  std::size_t cell_count() const { return bits.size(); }
  std::size_t occupied_count() const;
};

// Separating-axis test (13 axes) between a triangle and a closed box.
bool triangle_box_overlap(const Triangle& tri, const Aabb& box);

// Conservative surface voxelization: a cell is set iff its closed box
// overlaps at least one triangle. Cell boxes are taken from `cell_box`.
OccupancyGrid voxelize(const TriangleMesh& mesh, vec3 origin, int resolution, double voxel_size);
void          voxelize(const TriangleMesh& mesh, OccupancyGrid& grid);

// Voxelizes into an existing grid, only over cells in [lo, hi) per axis.
// Returns the number of cell/triangle overlap tests performed.
std::size_t voxelize_region(const TriangleMesh& mesh, OccupancyGrid& grid,
    std::array<int, 3> lo, std::array<int, 3> hi);

// Debug dump: `<prefix>.bits` (one byte per cell) and `<prefix>.json` header.
void write_occupancy_dump(const OccupancyGrid& grid, const std::filesystem::path& prefix);

}  // namespace splitrt
