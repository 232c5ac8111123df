#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "splitrt/math.hpp"

namespace splitrt {

// Triangles shorter than this in area are dropped on construction.
inline constexpr double kDegenerateArea = 1e-12;

// Indexed triangle mesh with one constant albedo. Scene units are meters.
struct TriangleMesh {
  std::vector<vec3>                         vertices;
  std::vector<std::array<std::uint32_t, 3>> indices;
  std::vector<vec3>                         normals;       // per vertex, optional
  std::vector<vec3>                         face_normals;  // one per triangle
  vec3                                      albedo = {0.8, 0.8, 0.8};
  std::size_t                               dropped_degenerate = 0;

  std::size_t triangle_count() const { return indices.size(); }
  bool        empty() const { return indices.empty(); }
  Triangle    triangle(std::size_t i) const {
    auto& ix = indices[i];
    return {vertices[ix[0]], vertices[ix[1]], vertices[ix[2]]};
  }
};

// Builds a mesh, validating indices, dropping degenerate triangles and
// computing face normals. Throws Error on out-of-range indices.
TriangleMesh make_mesh(std::vector<vec3> vertices,
    std::vector<std::array<std::uint32_t, 3>> indices, vec3 albedo = {0.8, 0.8, 0.8},
    std::vector<vec3> normals = {});

// Wavefront OBJ. Polygons are fan-triangulated from their first vertex.
TriangleMesh load_obj(const std::filesystem::path& path, vec3 albedo = {0.8, 0.8, 0.8});
TriangleMesh parse_obj(const std::string& text, const std::string& source_name,
    vec3 albedo = {0.8, 0.8, 0.8});
void         save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string  format_obj(const TriangleMesh& mesh);

// Minimal box containing all vertices. Throws EmptyMesh.
Aabb compute_bounds(const TriangleMesh& mesh);

struct Camera {
  vec3   position = {0, 0, 0};
  vec3   forward  = {0, 0, -1};
  vec3   up       = {0, 1, 0};
  double fov_y    = kPi / 3;  // radians
  int    width    = 256;
  int    height   = 256;

  // Throws ConfigError when the invariants do not hold.
  void validate() const;

  // Unit direction through the center of pixel (px, py); row 0 is the top.
  vec3 pixel_direction(double px, double py) const;
};

Camera look_at(vec3 position, vec3 target, vec3 up, double fov_y, int width, int height);

struct PointLight {
  vec3 position  = {0, 0, 0};
  vec3 intensity = {1, 1, 1};
};

// Needle foliage generated on demand (see make_foliage); keeps scene files small.
struct FoliageSpec {
  Aabb          region;
  int           count       = 0;
  double        half_length = 0.1;
  double        width       = 0.02;
  std::uint64_t seed        = 1;
  vec3          albedo      = {0.8, 0.8, 0.8};

  TriangleMesh build() const;
};

struct Scene {
  std::vector<TriangleMesh> meshes;
  std::vector<FoliageSpec>  foliage;
  std::vector<PointLight>   lights;
  Camera                    camera;

  // All meshes, then all built foliage, concatenated in order.
  TriangleMesh merged() const;
  // Albedo of each triangle of merged().
  std::vector<vec3> triangle_albedo() const;
};

// Scene description file: meshes (OBJ paths relative to the file), lights, camera.
Scene load_scene(const std::filesystem::path& path);
void  save_scene(const Scene& scene, const std::filesystem::path& directory,
     const std::string& name);

}  // namespace splitrt
