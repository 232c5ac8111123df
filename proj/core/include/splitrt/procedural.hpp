#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitrt/scene.hpp"

namespace splitrt {

// Mesh builders. Quads are emitted as two triangles per grid cell.
TriangleMesh make_quad(vec3 corner, vec3 edge_u, vec3 edge_v, int divisions_u, int divisions_v,
    vec3 albedo);
TriangleMesh make_box(vec3 center, vec3 half_size, double yaw, vec3 albedo, int divisions = 1);
TriangleMesh make_cylinder(vec3 base, double radius, double height, int segments, int rings,
    vec3 albedo);
TriangleMesh make_sphere(vec3 center, double radius, int segments, int rings, vec3 albedo);
// Cafe furniture standing on the floor at `floor_center`, rotated about +y.
TriangleMesh make_table(vec3 floor_center, double yaw, vec3 albedo);
TriangleMesh make_chair(vec3 floor_center, double yaw, vec3 albedo);
// Randomly placed and oriented needle-like triangles filling a box.
TriangleMesh make_foliage(const Aabb& region, int needles, double half_length, double width,
    std::uint64_t seed, vec3 albedo);

// Procedural test scenes, all in meters with +y up:
//   cornell  - box room open at the front, two rotated boxes and spheres
//   hall     - column-grid hall with clutter under an open foliage canopy;
//              the long-ray AO scene
//   fin      - floor and wall with a thin fin hanging just below a point light
//   contact  - a 0.4 m tile with a small block and backstop, every surface
//              within a short distance of every other
std::vector<std::string> scene_names();
Scene                    make_scene(const std::string& name);

}  // namespace splitrt
