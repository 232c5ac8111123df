#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "splitrt/voxelizer.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// CASCADED DISTANCE FIELD
// -----------------------------------------------------------------------------
// A camera-centered stack of same-resolution grids whose voxel size doubles
// per level. Each grid stores the unsigned distance (meters) from its cell
// centers to the nearest occupied cell center of the voxelized scene.

struct FieldConfig {
  int    cascade_count      = 5;
  int    cascade_resolution = 64;
  double finest_voxel       = 0.1;  // meters

  // Throws ConfigError.
  void validate() const;
  // Same cascade count and extents at twice the resolution (half the voxel size).
  FieldConfig halved() const;
};

// Per-cell nearest seed in lattice cell coordinates; x < 0 means "no seed".
struct SeedCoord {
  std::int16_t x = -1, y = -1, z = -1;

  bool valid() const { return x >= 0; }
  friend bool operator==(const SeedCoord&, const SeedCoord&) = default;
};

struct NearestSeedGrid {
  int                    resolution = 0;
  std::vector<SeedCoord> seeds;
};

// Standard jump flooding (27-tap, steps resolution/2, /4, ..., 1). Ties go to
// the candidate visited first. An empty grid yields "no seed" everywhere.
NearestSeedGrid jump_flood(const OccupancyGrid& seeds);

// Godunov upwind eikonal (|grad u| = 1) sweeps over the 8 orderings until the
// largest per-cell change of a round is below tolerance * voxel_size. Values
// only decrease. Returns the number of rounds.
int fast_sweep(std::vector<double>& distance, int resolution, double voxel_size,
    double tolerance = 1e-4);

struct Cascade {
  ivec3               center_cell;  // lattice coordinates of the snapped center
  int                 resolution = 0;
  double              voxel_size = 0;
  OccupancyGrid       occupancy;
  std::vector<SeedCoord> nearest_seed;
  std::vector<double> distance;
  bool                has_seeds = false;

  ivec3  lattice_min() const;
  vec3   origin() const;  // world position of the min corner
  Aabb   bounds() const;
  Aabb   safe_interior() const;  // bounds shrunk by one voxel
  vec3   center() const;
  vec3   cell_center(int i, int j, int k) const;
  vec3   seed_position(std::size_t cell) const;
  double at(int i, int j, int k) const { return distance[occupancy.index(i, j, k)]; }
  // Trilinear interpolation between cell centers, indices clamped to the grid.
  double trilinear(vec3 p) const;
};

struct FieldSample {
  double distance   = kInf;
  double voxel_size = 0;
  int    cascade    = -1;  // -1 when outside every cascade
};

struct RollStats {
  std::size_t cascades_moved    = 0;
  std::size_t cells_voxelized   = 0;
  std::size_t overlap_tests     = 0;
};

class CascadedDistanceField {
 public:
  CascadedDistanceField() = default;

  const std::vector<Cascade>& cascades() const { return cascades_; }
  const FieldConfig&          config() const { return config_; }
  int                         count() const { return static_cast<int>(cascades_.size()); }
  double                      finest_voxel() const { return config_.finest_voxel; }
  // True when no cascade holds any occupied cell.
  bool                        empty() const;

  // Finest cascade whose safe interior holds p. Outside every cascade the
  // coarsest is used, adding the distance to its bounds. Below the coarsest
  // level, a value larger than the distance to the cascade window is replaced
  // by the coarser levels' estimate (but never below the window distance), so
  // geometry outside a finer window is never stepped over.
  FieldSample sample(vec3 p) const;
  // Normalized central differences with step voxel_size / 2; +y if degenerate.
  vec3        gradient(vec3 p) const;
  // Voxel size of the cascade sample() would use; the coarsest outside all.
  double      voxel_size_at(vec3 p) const;

  friend CascadedDistanceField build_cascades(
      const TriangleMesh& mesh, vec3 camera_position, const FieldConfig& config);
  friend CascadedDistanceField roll_update(CascadedDistanceField field, vec3 new_camera_position,
      const TriangleMesh& mesh, RollStats* stats);

 private:
  double distance_from(vec3 p, int level) const;

  std::vector<Cascade> cascades_;
  FieldConfig          config_;
};

CascadedDistanceField build_cascades(
    const TriangleMesh& mesh, vec3 camera_position, const FieldConfig& config);

// Shifts every cascade whose snapped center changed by one whole voxel,
// voxelizing only the newly exposed slices, then recomputes its distances.
// Throws DisplacementTooLarge when any cascade would move by more than one voxel.
CascadedDistanceField roll_update(CascadedDistanceField field, vec3 new_camera_position,
    const TriangleMesh& mesh, RollStats* stats = nullptr);

// Snapped lattice center of a cascade with the given voxel size.
ivec3 snap_to_lattice(vec3 p, double voxel_size);

// Debug dump: `<prefix>_c<k>.raw` (float32, x fastest) plus `<prefix>.json`.
void write_field_dump(const CascadedDistanceField& field, const std::filesystem::path& prefix);

}  // namespace splitrt
