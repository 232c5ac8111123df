#include "splitrt/bvh.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "splitrt/errors.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// BUILD
// -----------------------------------------------------------------------------

namespace {

struct BuildItem {
  std::uint32_t node;
  std::uint32_t begin, end;
  int           depth;
};

// Past this depth nodes are split at the index midpoint, which bounds the
// tree depth (and so the traversal stack) for pathological inputs.
constexpr int kMaxSahDepth = 40;

struct Bin {
  Aabb          box;
  std::uint32_t count = 0;
};

// Returns the split position within [begin, end) after partitioning `ids`.
std::uint32_t split_node(std::vector<std::uint32_t>& ids, const std::vector<Aabb>& boxes,
    const std::vector<vec3>& centers, std::uint32_t begin, std::uint32_t end) {
  auto cbox = Aabb{};
  for (auto i = begin; i < end; i++) cbox.expand(centers[ids[i]]);
  auto extent = cbox.extent();

  auto best_cost = kInf;
  auto best_axis = -1;
  auto best_bin  = 0;
  for (auto axis = 0; axis < 3; axis++) {
    if (!(extent[axis] > 0)) continue;
    auto bins  = std::array<Bin, kBvhBins>{};
    auto scale = kBvhBins / extent[axis];
    auto bin_of = [&](std::uint32_t id) {
      auto b = static_cast<int>((centers[id][axis] - cbox.min[axis]) * scale);
      return std::clamp(b, 0, kBvhBins - 1);
    };
    for (auto i = begin; i < end; i++) {
      auto& bin = bins[bin_of(ids[i])];
      bin.box.expand(boxes[ids[i]]);
      bin.count++;
    }
    // sweep from the right to get suffix areas, then from the left
    auto right_area  = std::array<double, kBvhBins>{};
    auto right_count = std::array<std::uint32_t, kBvhBins>{};
    auto acc         = Aabb{};
    auto count       = std::uint32_t{0};
    for (auto b = kBvhBins - 1; b > 0; b--) {
      acc.expand(bins[b].box);
      count += bins[b].count;
      right_area[b]  = acc.half_area();
      right_count[b] = count;
    }
    acc   = Aabb{};
    count = 0;
    for (auto b = 0; b < kBvhBins - 1; b++) {
      acc.expand(bins[b].box);
      count += bins[b].count;
      if (count == 0 || right_count[b + 1] == 0) continue;
      auto cost = acc.half_area() * count + right_area[b + 1] * right_count[b + 1];
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_bin  = b;
      }
    }
  }

  if (best_axis < 0) return begin + (end - begin) / 2;  // coincident centroids

  auto scale = kBvhBins / extent[best_axis];
  auto mid   = std::partition(ids.begin() + begin, ids.begin() + end, [&](std::uint32_t id) {
    auto b = static_cast<int>((centers[id][best_axis] - cbox.min[best_axis]) * scale);
    return std::clamp(b, 0, kBvhBins - 1) <= best_bin;
  });
  return static_cast<std::uint32_t>(mid - ids.begin());
}

}  // namespace

Bvh build_bvh(const TriangleMesh& mesh) {
  if (mesh.empty()) throw EmptyMesh{};
  auto n       = static_cast<std::uint32_t>(mesh.triangle_count());
  auto boxes   = std::vector<Aabb>(n);
  auto centers = std::vector<vec3>(n);
  for (auto i = 0u; i < n; i++) {
    boxes[i]   = triangle_bounds(mesh.triangle(i));
    centers[i] = boxes[i].center();
  }
  auto ids = std::vector<std::uint32_t>(n);
  std::iota(ids.begin(), ids.end(), 0u);

  auto bvh = Bvh{};
  bvh.nodes.reserve(2 * n);
  bvh.nodes.push_back({});
  auto stack = std::vector<BuildItem>{{0, 0, n, 0}};
  while (!stack.empty()) {
    auto [node, begin, end, depth] = stack.back();
    stack.pop_back();
    auto box = Aabb{};
    for (auto i = begin; i < end; i++) box.expand(boxes[ids[i]]);
    bvh.nodes[node].box = box;
    if (end - begin <= static_cast<std::uint32_t>(kBvhMaxLeafSize)) {
      bvh.nodes[node].first = begin;
      bvh.nodes[node].count = end - begin;
      continue;
    }
    auto mid  = depth < kMaxSahDepth ? split_node(ids, boxes, centers, begin, end)
                                     : begin + (end - begin) / 2;
    auto left = static_cast<std::uint32_t>(bvh.nodes.size());
    bvh.nodes.push_back({});
    bvh.nodes.push_back({});
    bvh.nodes[node].first = left;
    bvh.nodes[node].count = 0;
    stack.push_back({left + 1, mid, end, depth + 1});
    stack.push_back({left, begin, mid, depth + 1});
  }

  bvh.triangle_order = ids;
  bvh.triangles.reserve(n);
  bvh.normals.reserve(n);
  for (auto id : ids) {
    bvh.triangles.push_back(mesh.triangle(id));
    bvh.normals.push_back(mesh.face_normals[id]);
  }
  return bvh;
}

// -----------------------------------------------------------------------------
// INTERSECTION
// -----------------------------------------------------------------------------

std::optional<TriangleHit> ray_triangle(vec3 origin, vec3 direction, const Triangle& tri) {
  auto e1  = tri[1] - tri[0];
  auto e2  = tri[2] - tri[0];
  auto p   = cross(direction, e2);
  auto det = dot(e1, p);
  if (std::abs(det) < kDeterminantEpsilon) return std::nullopt;
  auto inv = 1 / det;
  auto s   = origin - tri[0];
  auto u   = dot(s, p) * inv;
  if (u < 0 || u > 1) return std::nullopt;
  auto q = cross(s, e1);
  auto v = dot(direction, q) * inv;
  if (v < 0 || u + v > 1) return std::nullopt;
  auto t = dot(e2, q) * inv;
  if (!(t > 0)) return std::nullopt;
  return TriangleHit{t, u, v};
}

namespace {

// Slab distances are padded so that rounding never culls a box holding a hit
// whose triangle-test t lies in the interval; padding only costs extra visits.
inline double pad(double t) { return 1e-9 * (1 + std::abs(t)); }

struct RayBoxTester {
  vec3 origin, inv;
  std::array<bool, 3> parallel;

  RayBoxTester(vec3 o, vec3 d) : origin(o) {
    for (int a = 0; a < 3; a++) {
      parallel[a] = d[a] == 0;
      inv[a]      = parallel[a] ? 0 : 1 / d[a];
    }
  }

  // Entry distance into `box` within [a, b], or +inf when missed.
  double enter(const Aabb& box, double a, double b) const {
    auto tnear = -kInf, tfar = kInf;
    for (int k = 0; k < 3; k++) {
      if (parallel[k]) {
        if (origin[k] < box.min[k] || origin[k] > box.max[k]) return kInf;
        continue;
      }
      auto t0 = (box.min[k] - origin[k]) * inv[k];
      auto t1 = (box.max[k] - origin[k]) * inv[k];
      if (t0 > t1) std::swap(t0, t1);
      tnear = std::max(tnear, t0);
      tfar  = std::min(tfar, t1);
    }
    if (tnear > tfar + pad(tfar)) return kInf;
    if (tnear > b + pad(b) || tfar + pad(tfar) < a) return kInf;
    return tnear;
  }
};

template <bool AnyHit>
std::optional<HitResult> traverse(const Bvh& bvh, const RayQuery& query, WorkStats& stats) {
  auto& o = query.origin;
  auto& d = query.direction;
  auto  a = query.t_min;
  auto  b = query.t_max;
  if (!(a <= b)) return std::nullopt;

  auto tester = RayBoxTester{o, d};
  auto best_t = kInf;
  auto best   = std::uint32_t{0};
  auto found  = false;

  struct Entry {
    std::uint32_t node;
    double        tnear;
  };
  Entry stack[64];
  auto  top = 0;
  if (auto t = tester.enter(bvh.nodes[0].box, a, b); t < kInf) stack[top++] = {0, t};
  while (top > 0) {
    auto entry = stack[--top];
    // skip subtrees that start beyond a closer hit found after they were pushed
    if (found && entry.tnear > best_t + pad(best_t)) continue;
    auto& node = bvh.nodes[entry.node];
    stats.bvh_node_visits++;
    auto limit = found ? best_t : b;
    if (node.is_leaf()) {
      for (auto i = node.first; i < node.first + node.count; i++) {
        stats.triangle_tests++;
        auto hit = ray_triangle(o, d, bvh.triangles[i]);
        if (!hit || hit->t < a || hit->t > limit) continue;
        if (found && hit->t == best_t && i > best) continue;
        best_t = hit->t;
        best   = i;
        found  = true;
        limit  = best_t;
        if constexpr (AnyHit) break;
      }
      if (AnyHit && found) break;
      continue;
    }
    auto left  = node.first;
    auto right = node.first + 1;
    auto tl    = tester.enter(bvh.nodes[left].box, a, limit);
    auto tr    = tester.enter(bvh.nodes[right].box, a, limit);
    // push the far child first so the near one is popped next
    if (tl > tr) {
      std::swap(tl, tr);
      std::swap(left, right);
    }
    if (tr < kInf) stack[top++] = {right, tr};
    if (tl < kInf) stack[top++] = {left, tl};
  }

  if (!found) return std::nullopt;
  auto hit      = HitResult{};
  hit.t         = best_t;
  hit.point     = o + d * best_t;
  hit.normal    = bvh.normals[best];
  if (dot(hit.normal, d) > 0) hit.normal = -hit.normal;
  hit.source    = TracerKind::Exact;
  hit.primitive = bvh.triangle_order[best];
  return hit;
}

}  // namespace

std::optional<HitResult> intersect_closest(const Bvh& bvh, const RayQuery& query, WorkStats& stats) {
  return traverse<false>(bvh, query, stats);
}

std::optional<HitResult> intersect_any(const Bvh& bvh, const RayQuery& query, WorkStats& stats) {
  return traverse<true>(bvh, query, stats);
}

}  // namespace splitrt
