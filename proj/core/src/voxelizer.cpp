#include "splitrt/voxelizer.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "splitrt/errors.hpp"

namespace splitrt {

OccupancyGrid::OccupancyGrid(int resolution, vec3 origin, double voxel_size)
    : resolution(resolution), origin(origin), voxel_size(voxel_size) {
  if (resolution < 2) throw Error("occupancy grid resolution must be >= 2");
  if (!(voxel_size > 0)) throw Error("occupancy grid voxel size must be positive");
  bits.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
}

OccupancyGrid::OccupancyGrid(int resolution, ivec3 lattice_min, double voxel_size)
    : OccupancyGrid(resolution,
          vec3{static_cast<double>(lattice_min.x) * voxel_size,
              static_cast<double>(lattice_min.y) * voxel_size,
              static_cast<double>(lattice_min.z) * voxel_size},
          voxel_size) {
  this->lattice_min = lattice_min;
}

Aabb OccupancyGrid::cell_box(int i, int j, int k) const {
  if (lattice_min) {
    auto g = *lattice_min + ivec3{i, j, k};
    auto lo = vec3{static_cast<double>(g.x), static_cast<double>(g.y), static_cast<double>(g.z)};
    return {lo * voxel_size, (lo + vec3{1, 1, 1}) * voxel_size};
  }
  auto lo = origin + vec3{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)} * voxel_size;
  auto hi = origin + vec3{static_cast<double>(i + 1), static_cast<double>(j + 1), static_cast<double>(k + 1)} *
                         voxel_size;
  return {lo, hi};
}

std::size_t OccupancyGrid::occupied_count() const {
  auto n = std::size_t{0};
  for (auto b : bits) n += b != 0;
  return n;
}

// -----------------------------------------------------------------------------
// TRIANGLE / BOX
// -----------------------------------------------------------------------------

bool triangle_box_overlap(const Triangle& tri, const Aabb& box) {
  auto c  = box.center();
  auto h  = box.extent() * 0.5;
  auto v0 = tri[0] - c, v1 = tri[1] - c, v2 = tri[2] - c;

  // box face normals
  for (int a = 0; a < 3; a++) {
    auto lo = std::min(v0[a], std::min(v1[a], v2[a]));
    auto hi = std::max(v0[a], std::max(v1[a], v2[a]));
    if (lo > h[a] || hi < -h[a]) return false;
  }

  // triangle plane
  auto e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;
  auto n  = cross(e0, e1);
  auto r  = h.x * std::abs(n.x) + h.y * std::abs(n.y) + h.z * std::abs(n.z);
  if (std::abs(dot(n, v0)) > r) return false;

  // edge x box-axis cross products
  const vec3 edges[3] = {e0, e1, e2};
  const vec3 units[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (auto& e : edges) {
    for (auto& u : units) {
      auto axis = cross(e, u);
      auto p0 = dot(axis, v0), p1 = dot(axis, v1), p2 = dot(axis, v2);
      auto rad = h.x * std::abs(axis.x) + h.y * std::abs(axis.y) + h.z * std::abs(axis.z);
      if (std::min(p0, std::min(p1, p2)) > rad || std::max(p0, std::max(p1, p2)) < -rad) return false;
    }
  }
  return true;
}

// -----------------------------------------------------------------------------
// VOXELIZATION
// -----------------------------------------------------------------------------

std::size_t voxelize_region(
    const TriangleMesh& mesh, OccupancyGrid& grid, std::array<int, 3> lo, std::array<int, 3> hi) {
  auto tests = std::size_t{0};
  for (std::size_t t = 0; t < mesh.triangle_count(); t++) {
    auto tri    = mesh.triangle(t);
    auto bounds = triangle_bounds(tri);
    auto first  = std::array<int, 3>{};
    auto last   = std::array<int, 3>{};
    auto skip   = false;
    for (int a = 0; a < 3; a++) {
      // one cell of slack on each side; the SAT decides exactly
      auto fmin = std::floor((bounds.min[a] - grid.origin[a]) / grid.voxel_size) - 1;
      auto fmax = std::floor((bounds.max[a] - grid.origin[a]) / grid.voxel_size) + 1;
      fmin      = std::max(fmin, static_cast<double>(lo[a]));
      fmax      = std::min(fmax, static_cast<double>(hi[a] - 1));
      if (fmin > fmax) {
        skip = true;
        break;
      }
      first[a] = static_cast<int>(fmin);
      last[a]  = static_cast<int>(fmax);
    }
    if (skip) continue;
    for (auto k = first[2]; k <= last[2]; k++)
      for (auto j = first[1]; j <= last[1]; j++)
        for (auto i = first[0]; i <= last[0]; i++) {
          if (grid.occupied(i, j, k)) continue;
          tests++;
          if (triangle_box_overlap(tri, grid.cell_box(i, j, k))) grid.set(i, j, k);
        }
  }
  return tests;
}

void voxelize(const TriangleMesh& mesh, OccupancyGrid& grid) {
  auto n = grid.resolution;
  voxelize_region(mesh, grid, {0, 0, 0}, {n, n, n});
}

OccupancyGrid voxelize(const TriangleMesh& mesh, vec3 origin, int resolution, double voxel_size) {
  auto grid = OccupancyGrid{resolution, origin, voxel_size};
  voxelize(mesh, grid);
  return grid;
}

void write_occupancy_dump(const OccupancyGrid& grid, const std::filesystem::path& prefix) {
  auto packed = std::vector<std::uint8_t>((grid.bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < grid.bits.size(); i++)
    if (grid.bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  auto bits_path = std::filesystem::path{prefix.string() + ".bits"};
  auto file      = std::ofstream{bits_path, std::ios::binary};
  if (!file) throw IoError("cannot write " + bits_path.string());
  file.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));

  auto header = nlohmann::json{{"resolution", grid.resolution},
      {"origin", {grid.origin.x, grid.origin.y, grid.origin.z}}, {"voxel_size", grid.voxel_size},
      {"layout", "x-fastest, 1 bit per cell, LSB first"}};
  auto json_path = std::filesystem::path{prefix.string() + ".json"};
  auto hfile     = std::ofstream{json_path};
  if (!hfile) throw IoError("cannot write " + json_path.string());
  hfile << header.dump(2) << '\n';
}

}  // namespace splitrt
