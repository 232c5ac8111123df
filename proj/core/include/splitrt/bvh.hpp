#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "splitrt/ray.hpp"
#include "splitrt/scene.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// EXACT TRACER
// -----------------------------------------------------------------------------
// Closest-hit and any-hit triangle queries over a closed t-interval, through a
// binary BVH built with binned SAH. This is the precise (and expensive) path.

inline constexpr int    kBvhBins        = 8;
inline constexpr int    kBvhMaxLeafSize = 4;
inline constexpr double kDeterminantEpsilon = 1e-9;

struct BvhNode {
  Aabb          box;
  std::uint32_t first = 0;  // leaf: first triangle; internal: left child (right = first + 1)
  std::uint32_t count = 0;  // leaf: triangle count; 0 for internal nodes

  bool is_leaf() const { return count > 0; }
};

struct Bvh {
  std::vector<BvhNode>       nodes;           // nodes[0] is the root
  std::vector<std::uint32_t> triangle_order;  // BVH slot -> mesh triangle id
  std::vector<Triangle>      triangles;       // in BVH slot order
  std::vector<vec3>          normals;         // face normals, in BVH slot order

  std::size_t triangle_count() const { return triangles.size(); }
  const Aabb& bounds() const { return nodes.front().box; }
};

// Deterministic for a fixed mesh. Throws EmptyMesh.
Bvh build_bvh(const TriangleMesh& mesh);

struct TriangleHit {
  double t = 0;
  double u = 0, v = 0;  // barycentrics of vertices 1 and 2; vertex 0 gets 1 - u - v
};

// Moller-Trumbore. Returns hits with t > 0 only; near-parallel rays
// (|det| < kDeterminantEpsilon) miss.
std::optional<TriangleHit> ray_triangle(vec3 origin, vec3 direction, const Triangle& tri);

// Closest hit with t in [query.t_min, query.t_max]; the query flag is ignored.
std::optional<HitResult> intersect_closest(const Bvh& bvh, const RayQuery& query, WorkStats& stats);
// Some hit with t in [query.t_min, query.t_max], not necessarily the closest.
std::optional<HitResult> intersect_any(const Bvh& bvh, const RayQuery& query, WorkStats& stats);

}  // namespace splitrt
