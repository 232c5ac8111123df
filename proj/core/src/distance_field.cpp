#include "splitrt/distance_field.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "splitrt/errors.hpp"

namespace splitrt {

void FieldConfig::validate() const {
  if (cascade_count < 1) throw ConfigError("cascade_count must be >= 1");
  if (cascade_resolution < 2 || cascade_resolution % 2 != 0 || cascade_resolution > 4096)
    throw ConfigError("cascade_resolution must be even and in [2, 4096]");
  if (!(finest_voxel > 0) || !std::isfinite(finest_voxel))
    throw ConfigError("finest_voxel_m must be positive");
}

FieldConfig FieldConfig::halved() const {
  auto c         = *this;
  c.finest_voxel       = finest_voxel / 2;
  c.cascade_resolution = cascade_resolution * 2;
  return c;
}

// -----------------------------------------------------------------------------
// JUMP FLOODING
// -----------------------------------------------------------------------------

namespace {

inline std::int64_t squared_distance(int i, int j, int k, SeedCoord s) {
  auto dx = std::int64_t{i} - s.x, dy = std::int64_t{j} - s.y, dz = std::int64_t{k} - s.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

NearestSeedGrid jump_flood(const OccupancyGrid& grid) {
  auto n      = grid.resolution;
  auto result = NearestSeedGrid{n, std::vector<SeedCoord>(grid.cell_count())};
  auto& cur   = result.seeds;
  auto any    = false;
  for (int k = 0; k < n; k++)
    for (int j = 0; j < n; j++)
      for (int i = 0; i < n; i++)
        if (grid.occupied(i, j, k)) {
          cur[grid.index(i, j, k)] = {static_cast<std::int16_t>(i), static_cast<std::int16_t>(j),
              static_cast<std::int16_t>(k)};
          any = true;
        }
  if (!any) return result;

  auto next = cur;
  for (auto step = n / 2; step >= 1; step /= 2) {
    for (int k = 0; k < n; k++)
      for (int j = 0; j < n; j++)
        for (int i = 0; i < n; i++) {
          auto index  = grid.index(i, j, k);
          auto best   = cur[index];
          auto best_d = best.valid() ? squared_distance(i, j, k, best) : INT64_MAX;
          for (int dz = -1; dz <= 1; dz++) {
            auto nk = k + dz * step;
            if (nk < 0 || nk >= n) continue;
            for (int dy = -1; dy <= 1; dy++) {
              auto nj = j + dy * step;
              if (nj < 0 || nj >= n) continue;
              for (int dx = -1; dx <= 1; dx++) {
                auto ni = i + dx * step;
                if (ni < 0 || ni >= n) continue;
                auto s = cur[grid.index(ni, nj, nk)];
                if (!s.valid()) continue;
                auto d = squared_distance(i, j, k, s);
                if (d < best_d) {
                  best_d = d;
                  best   = s;
                }
              }
            }
          }
          next[index] = best;
        }
    std::swap(cur, next);
  }
  return result;
}

// -----------------------------------------------------------------------------
// FAST SWEEPING
// -----------------------------------------------------------------------------

namespace {

// Godunov upwind solution of |grad u| = 1 given the smallest neighbor per axis.
inline double eikonal_update(double a, double b, double c, double h) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  if (a == kInf) return kInf;
  auto x = a + h;
  if (x <= b) return x;
  x = (a + b + std::sqrt(2 * h * h - (a - b) * (a - b))) / 2;
  if (x <= c) return x;
  auto s = a + b + c;
  auto q = a * a + b * b + c * c - h * h;
  return (s + std::sqrt(std::max(0.0, s * s - 3 * q))) / 3;
}

}  // namespace

int fast_sweep(std::vector<double>& u, int n, double h, double tolerance) {
  auto index = [n](int i, int j, int k) {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * (j + static_cast<std::size_t>(n) * k);
  };
  auto neighbor_min = [&](int i, int j, int k, int axis) {
    auto lo = kInf, hi = kInf;
    auto c  = std::array<int, 3>{i, j, k};
    if (c[axis] > 0) {
      auto m  = c;
      m[axis] -= 1;
      lo = u[index(m[0], m[1], m[2])];
    }
    if (c[axis] < n - 1) {
      auto m  = c;
      m[axis] += 1;
      hi = u[index(m[0], m[1], m[2])];
    }
    return std::min(lo, hi);
  };

  constexpr int kMaxRounds = 64;
  auto          rounds     = 0;
  while (rounds < kMaxRounds) {
    auto max_change = 0.0;
    for (int order = 0; order < 8; order++) {
      auto sx = (order & 1) ? -1 : 1, sy = (order & 2) ? -1 : 1, sz = (order & 4) ? -1 : 1;
      for (int kk = 0; kk < n; kk++) {
        auto k = sz > 0 ? kk : n - 1 - kk;
        for (int jj = 0; jj < n; jj++) {
          auto j = sy > 0 ? jj : n - 1 - jj;
          for (int ii = 0; ii < n; ii++) {
            auto i   = sx > 0 ? ii : n - 1 - ii;
            auto idx = index(i, j, k);
            auto old = u[idx];
            if (old == 0) continue;
            auto x = eikonal_update(
                neighbor_min(i, j, k, 0), neighbor_min(i, j, k, 1), neighbor_min(i, j, k, 2), h);
            if (x < old) {
              max_change = std::max(max_change, old == kInf ? kInf : old - x);
              u[idx]     = x;
            }
          }
        }
      }
    }
    rounds++;
    if (max_change < tolerance * h) break;
  }
  return rounds;
}

// -----------------------------------------------------------------------------
// CASCADES
// -----------------------------------------------------------------------------

ivec3 Cascade::lattice_min() const {
  auto half = resolution / 2;
  return center_cell - ivec3{half, half, half};
}

vec3 Cascade::origin() const { return occupancy.origin; }

Aabb Cascade::bounds() const {
  auto o = origin();
  return {o, o + vec3{1, 1, 1} * (resolution * voxel_size)};
}

Aabb Cascade::safe_interior() const {
  auto b = bounds();
  return {b.min + vec3{1, 1, 1} * voxel_size, b.max - vec3{1, 1, 1} * voxel_size};
}

vec3 Cascade::center() const {
  return vec3{static_cast<double>(center_cell.x), static_cast<double>(center_cell.y),
             static_cast<double>(center_cell.z)} *
         voxel_size;
}

vec3 Cascade::cell_center(int i, int j, int k) const {
  return origin() + vec3{i + 0.5, j + 0.5, k + 0.5} * voxel_size;
}

vec3 Cascade::seed_position(std::size_t cell) const {
  auto s = nearest_seed[cell];
  if (!s.valid()) return {kInf, kInf, kInf};
  return cell_center(s.x, s.y, s.z);
}

double Cascade::trilinear(vec3 p) const {
  if (!has_seeds) return kInf;
  auto u  = (p - origin()) / voxel_size - vec3{0.5, 0.5, 0.5};
  int  i0[3];
  double f[3];
  for (int a = 0; a < 3; a++) {
    auto fl = std::floor(u[a]);
    auto c  = std::clamp(fl, 0.0, static_cast<double>(resolution - 2));
    i0[a]   = static_cast<int>(c);
    f[a]    = std::clamp(u[a] - c, 0.0, 1.0);
  }
  auto lerp = [](double x, double y, double t) { return x + (y - x) * t; };
  auto c00  = lerp(at(i0[0], i0[1], i0[2]), at(i0[0] + 1, i0[1], i0[2]), f[0]);
  auto c10  = lerp(at(i0[0], i0[1] + 1, i0[2]), at(i0[0] + 1, i0[1] + 1, i0[2]), f[0]);
  auto c01  = lerp(at(i0[0], i0[1], i0[2] + 1), at(i0[0] + 1, i0[1], i0[2] + 1), f[0]);
  auto c11  = lerp(at(i0[0], i0[1] + 1, i0[2] + 1), at(i0[0] + 1, i0[1] + 1, i0[2] + 1), f[0]);
  return lerp(lerp(c00, c10, f[1]), lerp(c01, c11, f[1]), f[2]);
}

ivec3 snap_to_lattice(vec3 p, double voxel_size) {
  auto snap = [&](double x) { return static_cast<std::int64_t>(std::floor(x / voxel_size + 0.5)); };
  return {snap(p.x), snap(p.y), snap(p.z)};
}

namespace {

// Seeds, jump flooding and sweeping over an already voxelized cascade.
void compute_distances(Cascade& c) {
  auto n         = c.resolution;
  auto nearest   = jump_flood(c.occupancy);
  c.nearest_seed = std::move(nearest.seeds);
  c.distance.assign(c.occupancy.cell_count(), kInf);
  c.has_seeds = false;
  for (int k = 0; k < n; k++)
    for (int j = 0; j < n; j++)
      for (int i = 0; i < n; i++) {
        auto idx = c.occupancy.index(i, j, k);
        auto s   = c.nearest_seed[idx];
        if (!s.valid()) continue;
        c.has_seeds     = true;
        c.distance[idx] = std::sqrt(static_cast<double>(squared_distance(i, j, k, s))) * c.voxel_size;
      }
  fast_sweep(c.distance, n, c.voxel_size);
}

Cascade make_cascade(const TriangleMesh& mesh, vec3 camera, int resolution, double voxel_size) {
  auto c        = Cascade{};
  c.center_cell = snap_to_lattice(camera, voxel_size);
  c.resolution  = resolution;
  c.voxel_size  = voxel_size;
  c.occupancy   = OccupancyGrid{resolution, c.lattice_min(), voxel_size};
  voxelize(mesh, c.occupancy);
  compute_distances(c);
  return c;
}

}  // namespace

CascadedDistanceField build_cascades(const TriangleMesh& mesh, vec3 camera, const FieldConfig& config) {
  config.validate();
  auto field    = CascadedDistanceField{};
  field.config_ = config;
  auto voxel    = config.finest_voxel;
  for (int level = 0; level < config.cascade_count; level++, voxel *= 2)
    field.cascades_.push_back(make_cascade(mesh, camera, config.cascade_resolution, voxel));
  return field;
}

CascadedDistanceField roll_update(
    CascadedDistanceField field, vec3 camera, const TriangleMesh& mesh, RollStats* stats) {
  auto deltas = std::vector<ivec3>{};
  for (auto& c : field.cascades_) {
    auto delta = snap_to_lattice(camera, c.voxel_size) - c.center_cell;
    for (int a = 0; a < 3; a++)
      if (std::abs(delta[a]) > 1)
        throw DisplacementTooLarge("camera moved more than one voxel of a " +
                                   std::to_string(c.voxel_size) + " m cascade; chunk the move");
    deltas.push_back(delta);
  }

  for (std::size_t level = 0; level < field.cascades_.size(); level++) {
    auto& old   = field.cascades_[level];
    auto  delta = deltas[level];
    if (delta == ivec3{}) continue;

    auto n        = old.resolution;
    auto next     = Cascade{};
    next.center_cell = old.center_cell + delta;
    next.resolution  = n;
    next.voxel_size  = old.voxel_size;
    next.occupancy   = OccupancyGrid{n, next.lattice_min(), next.voxel_size};
    for (int k = 0; k < n; k++)
      for (int j = 0; j < n; j++)
        for (int i = 0; i < n; i++) {
          auto si = i + delta.x, sj = j + delta.y, sk = k + delta.z;
          if (si < 0 || sj < 0 || sk < 0 || si >= n || sj >= n || sk >= n) continue;
          if (old.occupancy.occupied(static_cast<int>(si), static_cast<int>(sj), static_cast<int>(sk)))
            next.occupancy.set(i, j, k);
        }
    // newly exposed slabs: one per axis that moved
    auto tests = std::size_t{0}, cells = std::size_t{0};
    for (int a = 0; a < 3; a++) {
      if (delta[a] == 0) continue;
      auto lo = std::array<int, 3>{0, 0, 0};
      auto hi = std::array<int, 3>{n, n, n};
      if (delta[a] > 0)
        lo[a] = n - 1;
      else
        hi[a] = 1;
      tests += voxelize_region(mesh, next.occupancy, lo, hi);
      cells += static_cast<std::size_t>(n) * n;
    }
    compute_distances(next);
    // publish the whole cascade at once
    std::swap(field.cascades_[level], next);
    if (stats) {
      stats->cascades_moved++;
      stats->cells_voxelized += cells;
      stats->overlap_tests += tests;
    }
  }
  return field;
}

bool CascadedDistanceField::empty() const {
  return cascades_.empty() || !cascades_.back().has_seeds;
}

FieldSample CascadedDistanceField::sample(vec3 p) const {
  if (empty()) {
    auto vs = cascades_.empty() ? 0.0 : cascades_.back().voxel_size;
    return {kInf, vs, cascades_.empty() ? -1 : count() - 1};
  }
  for (int level = 0; level < count() - 1; level++)
    if (cascades_[level].safe_interior().contains(p))
      return {distance_from(p, level), cascades_[level].voxel_size, level};
  auto& c = cascades_.back();
  auto outside = distance_to_box(c.bounds(), p);
  return {distance_from(p, count() - 1), c.voxel_size, outside > 0 ? -1 : count() - 1};
}

double CascadedDistanceField::distance_from(vec3 p, int level) const {
  auto& c = cascades_[level];
  if (level == count() - 1) {
    if (c.safe_interior().contains(p)) return c.trilinear(p);
    return distance_to_box(c.bounds(), p) + c.trilinear(clamp_to_box(c.safe_interior(), p));
  }
  if (!c.safe_interior().contains(p)) return distance_from(p, level + 1);
  // Geometry outside this window is at least `window` away; past that, the
  // coarser level bounds the distance.
  auto b      = c.bounds();
  auto window = min_component(min(p - b.min, b.max - p));
  auto fine   = c.trilinear(p);
  if (fine <= window) return fine;
  return std::max(window, std::min(fine, distance_from(p, level + 1)));
}

vec3 CascadedDistanceField::gradient(vec3 p) const {
  auto h = voxel_size_at(p) / 2;
  auto g = vec3{sample(p + vec3{h, 0, 0}).distance - sample(p - vec3{h, 0, 0}).distance,
      sample(p + vec3{0, h, 0}).distance - sample(p - vec3{0, h, 0}).distance,
      sample(p + vec3{0, 0, h}).distance - sample(p - vec3{0, 0, h}).distance};
  auto l = length(g);
  if (!(l > 0) || !std::isfinite(l)) return {0, 1, 0};
  return g / l;
}

double CascadedDistanceField::voxel_size_at(vec3 p) const {
  for (auto& c : cascades_)
    if (c.safe_interior().contains(p)) return c.voxel_size;
  return cascades_.empty() ? config_.finest_voxel : cascades_.back().voxel_size;
}

void write_field_dump(const CascadedDistanceField& field, const std::filesystem::path& prefix) {
  auto header = nlohmann::json{{"cascade_count", field.count()}, {"cascades", nlohmann::json::array()}};
  for (int level = 0; level < field.count(); level++) {
    auto& c    = field.cascades()[level];
    auto  name = prefix.filename().string() + "_c" + std::to_string(level) + ".raw";
    auto  path = prefix.parent_path() / name;
    auto  file = std::ofstream{path, std::ios::binary};
    if (!file) throw IoError("cannot write " + path.string());
    for (auto d : c.distance) {
      auto f = static_cast<float>(d);
      file.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
    auto o = c.origin();
    header["cascades"].push_back({{"file", name}, {"resolution", c.resolution},
        {"voxel_size", c.voxel_size}, {"origin", {o.x, o.y, o.z}}, {"format", "float32 x-fastest"}});
  }
  auto path = std::filesystem::path{prefix.string() + ".json"};
  auto file = std::ofstream{path};
  if (!file) throw IoError("cannot write " + path.string());
  file << header.dump(2) << '\n';
}

}  // namespace splitrt
