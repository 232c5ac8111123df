#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace splitrt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi  = 3.14159265358979323846;

// -----------------------------------------------------------------------------
// VECTORS
// -----------------------------------------------------------------------------

struct vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double  operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr bool operator==(const vec3&, const vec3&) = default;
};

constexpr vec3 operator+(vec3 a, vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr vec3 operator-(vec3 a, vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr vec3 operator-(vec3 a) { return {-a.x, -a.y, -a.z}; }
constexpr vec3 operator*(vec3 a, vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
constexpr vec3 operator*(vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr vec3 operator*(double s, vec3 a) { return a * s; }
constexpr vec3 operator/(vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
constexpr vec3& operator+=(vec3& a, vec3 b) { return a = a + b; }
constexpr vec3& operator-=(vec3& a, vec3 b) { return a = a - b; }
constexpr vec3& operator*=(vec3& a, double s) { return a = a * s; }

constexpr double dot(vec3 a, vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr vec3   cross(vec3 a, vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(vec3 a) { return std::sqrt(dot(a, a)); }
inline vec3   normalize(vec3 a) {
  auto l = length(a);
  return l > 0 ? a / l : a;
}
inline double distance(vec3 a, vec3 b) { return length(a - b); }

constexpr vec3 min(vec3 a, vec3 b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr vec3 max(vec3 a, vec3 b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
constexpr double max_component(vec3 a) { return std::max(a.x, std::max(a.y, a.z)); }
constexpr double min_component(vec3 a) { return std::min(a.x, std::min(a.y, a.z)); }

inline bool is_finite(vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Integer lattice coordinate, used for voxel grids and cascade centers.
struct ivec3 {
  std::int64_t x = 0, y = 0, z = 0;

  constexpr std::int64_t  operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr std::int64_t& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr bool operator==(const ivec3&, const ivec3&) = default;
};

constexpr ivec3 operator+(ivec3 a, ivec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr ivec3 operator-(ivec3 a, ivec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// Builds an orthonormal basis around a unit vector (Duff et al. 2017).
inline void orthonormal_basis(vec3 n, vec3& t, vec3& b) {
  auto sign = std::copysign(1.0, n.z);
  auto a    = -1.0 / (sign + n.z);
  auto c    = n.x * n.y * a;
  t         = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
  b         = {c, sign + n.y * n.y * a, -n.y};
}

// -----------------------------------------------------------------------------
// BOUNDING BOXES
// -----------------------------------------------------------------------------

struct Aabb {
  vec3 min = {kInf, kInf, kInf};
  vec3 max = {-kInf, -kInf, -kInf};

  constexpr bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  constexpr vec3 extent() const { return max - min; }
  constexpr vec3 center() const { return (min + max) * 0.5; }

  constexpr void expand(vec3 p) {
    min = splitrt::min(min, p);
    max = splitrt::max(max, p);
  }
  constexpr void expand(const Aabb& b) {
    min = splitrt::min(min, b.min);
    max = splitrt::max(max, b.max);
  }

  constexpr bool contains(vec3 p) const {
    return p.x >= min.x && p.y >= min.y && p.z >= min.z && p.x <= max.x &&
           p.y <= max.y && p.z <= max.z;
  }
  constexpr bool contains(const Aabb& b) const { return contains(b.min) && contains(b.max); }

  constexpr double half_area() const {
    if (empty()) return 0;
    auto e = extent();
    return e.x * e.y + e.y * e.z + e.z * e.x;
  }

  friend constexpr bool operator==(const Aabb&, const Aabb&) = default;
};

// Distance from p to the closed box (0 inside).
inline double distance_to_box(const Aabb& box, vec3 p) {
  auto d = max(max(box.min - p, p - box.max), vec3{0, 0, 0});
  return length(d);
}

inline vec3 clamp_to_box(const Aabb& box, vec3 p) { return max(box.min, min(p, box.max)); }

using Triangle = std::array<vec3, 3>;

inline Aabb triangle_bounds(const Triangle& tri) {
  Aabb box;
  for (auto& v : tri) box.expand(v);
  return box;
}

inline vec3 triangle_normal(const Triangle& tri) {
  return normalize(cross(tri[1] - tri[0], tri[2] - tri[0]));
}

inline double triangle_area(const Triangle& tri) {
  return 0.5 * length(cross(tri[1] - tri[0], tri[2] - tri[0]));
}

}  // namespace splitrt
