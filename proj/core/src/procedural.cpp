#include "splitrt/procedural.hpp"

#include <random>

#include "splitrt/errors.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// MESH BUILDERS
// -----------------------------------------------------------------------------

namespace {

using Index3 = std::array<std::uint32_t, 3>;

void append(TriangleMesh& dst, const TriangleMesh& src) {
  auto base = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  for (auto ix : src.indices) dst.indices.push_back({ix[0] + base, ix[1] + base, ix[2] + base});
}

TriangleMesh finish(const TriangleMesh& raw, vec3 albedo) {
  return make_mesh(raw.vertices, raw.indices, albedo);
}

}  // namespace

TriangleMesh make_quad(vec3 corner, vec3 edge_u, vec3 edge_v, int nu, int nv, vec3 albedo) {
  auto raw = TriangleMesh{};
  for (int j = 0; j <= nv; j++)
    for (int i = 0; i <= nu; i++)
      raw.vertices.push_back(corner + edge_u * (static_cast<double>(i) / nu) +
                             edge_v * (static_cast<double>(j) / nv));
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>(j * (nu + 1) + i); };
  for (int j = 0; j < nv; j++)
    for (int i = 0; i < nu; i++) {
      raw.indices.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      raw.indices.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return finish(raw, albedo);
}

TriangleMesh make_box(vec3 center, vec3 h, double yaw, vec3 albedo, int divisions) {
  auto c = std::cos(yaw), s = std::sin(yaw);
  auto rotate = [&](vec3 p) { return vec3{c * p.x + s * p.z, p.y, -s * p.x + c * p.z}; };
  auto raw = TriangleMesh{};
  // each face as (corner, u, v) in local space, wound outward
  const vec3 faces[6][3] = {
      {{-h.x, -h.y, h.z}, {2 * h.x, 0, 0}, {0, 2 * h.y, 0}},    // +z
      {{h.x, -h.y, -h.z}, {-2 * h.x, 0, 0}, {0, 2 * h.y, 0}},   // -z
      {{h.x, -h.y, h.z}, {0, 0, -2 * h.z}, {0, 2 * h.y, 0}},    // +x
      {{-h.x, -h.y, -h.z}, {0, 0, 2 * h.z}, {0, 2 * h.y, 0}},   // -x
      {{-h.x, h.y, h.z}, {2 * h.x, 0, 0}, {0, 0, -2 * h.z}},    // +y
      {{-h.x, -h.y, -h.z}, {2 * h.x, 0, 0}, {0, 0, 2 * h.z}},   // -y
  };
  for (auto& f : faces) {
    auto q = make_quad(f[0], f[1], f[2], divisions, divisions, albedo);
    for (auto& v : q.vertices) v = center + rotate(v);
    append(raw, q);
  }
  return finish(raw, albedo);
}

TriangleMesh make_cylinder(vec3 base, double radius, double height, int segments, int rings,
    vec3 albedo) {
  auto raw = TriangleMesh{};
  for (int r = 0; r <= rings; r++)
    for (int s = 0; s < segments; s++) {
      auto phi = 2 * kPi * s / segments;
      raw.vertices.push_back(
          base + vec3{radius * std::cos(phi), height * r / rings, radius * std::sin(phi)});
    }
  auto id = [&](int s, int r) { return static_cast<std::uint32_t>(r * segments + (s % segments)); };
  for (int r = 0; r < rings; r++)
    for (int s = 0; s < segments; s++) {
      raw.indices.push_back({id(s, r), id(s, r + 1), id(s + 1, r + 1)});
      raw.indices.push_back({id(s, r), id(s + 1, r + 1), id(s + 1, r)});
    }
  return finish(raw, albedo);
}

TriangleMesh make_sphere(vec3 center, double radius, int segments, int rings, vec3 albedo) {
  auto raw = TriangleMesh{};
  for (int r = 0; r <= rings; r++) {
    auto theta = kPi * r / rings;
    for (int s = 0; s <= segments; s++) {
      auto phi = 2 * kPi * s / segments;
      raw.vertices.push_back(center + vec3{std::sin(theta) * std::cos(phi), std::cos(theta),
                                          std::sin(theta) * std::sin(phi)} *
                                          radius);
    }
  }
  auto id = [&](int s, int r) { return static_cast<std::uint32_t>(r * (segments + 1) + s); };
  for (int r = 0; r < rings; r++)
    for (int s = 0; s < segments; s++) {
      // pole rows produce one degenerate triangle per quad; make_mesh drops it
      raw.indices.push_back({id(s, r), id(s + 1, r + 1), id(s, r + 1)});
      raw.indices.push_back({id(s, r), id(s + 1, r), id(s + 1, r + 1)});
    }
  return finish(raw, albedo);
}

TriangleMesh make_foliage(const Aabb& region, int needles, double half_length, double width,
    std::uint64_t seed, vec3 albedo) {
  auto rng     = std::mt19937_64{seed};
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto raw     = TriangleMesh{};
  raw.vertices.reserve(static_cast<std::size_t>(needles) * 3);
  raw.indices.reserve(static_cast<std::size_t>(needles));
  auto size = region.extent();
  for (int i = 0; i < needles; i++) {
    auto c    = region.min + vec3{uniform() * size.x, uniform() * size.y, uniform() * size.z};
    auto axis = normalize(vec3{uniform(), uniform(), uniform()} * 2 - vec3{1, 1, 1});
    vec3 t, b;
    orthonormal_basis(axis, t, b);
    auto base = static_cast<std::uint32_t>(raw.vertices.size());
    raw.vertices.push_back(c + axis * half_length);
    raw.vertices.push_back(c - axis * half_length);
    raw.vertices.push_back(c + t * width);
    raw.indices.push_back({base, base + 1, base + 2});
  }
  return finish(raw, albedo);
}

TriangleMesh make_table(vec3 floor_center, double yaw, vec3 albedo) {
  auto c = std::cos(yaw), s = std::sin(yaw);
  auto at = [&](double x, double y, double z) {
    return floor_center + vec3{c * x + s * z, y, -s * x + c * z};
  };
  auto raw = TriangleMesh{};
  append(raw, make_box(at(0, 0.735, 0), {0.4, 0.015, 0.4}, yaw, albedo));
  for (auto [x, z] : {std::pair{-0.34, -0.34}, {0.34, -0.34}, {-0.34, 0.34}, {0.34, 0.34}})
    append(raw, make_box(at(x, 0.36, z), {0.02, 0.36, 0.02}, yaw, albedo));
  return finish(raw, albedo);
}

TriangleMesh make_chair(vec3 floor_center, double yaw, vec3 albedo) {
  auto c = std::cos(yaw), s = std::sin(yaw);
  auto at = [&](double x, double y, double z) {
    return floor_center + vec3{c * x + s * z, y, -s * x + c * z};
  };
  auto raw = TriangleMesh{};
  append(raw, make_box(at(0, 0.45, 0), {0.2, 0.012, 0.2}, yaw, albedo));
  for (auto [x, z] : {std::pair{-0.17, -0.17}, {0.17, -0.17}, {-0.17, 0.17}, {0.17, 0.17}})
    append(raw, make_box(at(x, 0.22, z), {0.015, 0.22, 0.015}, yaw, albedo));
  // backrest slats
  for (auto x : {-0.17, -0.06, 0.06, 0.17})
    append(raw, make_box(at(x, 0.7, -0.18), {0.015, 0.24, 0.012}, yaw, albedo));
  append(raw, make_box(at(0, 0.92, -0.18), {0.2, 0.03, 0.012}, yaw, albedo));
  return finish(raw, albedo);
}

// -----------------------------------------------------------------------------
// SCENES
// -----------------------------------------------------------------------------

namespace {

constexpr vec3 kWhite = {0.75, 0.75, 0.75};
constexpr vec3 kRed   = {0.65, 0.1, 0.08};
constexpr vec3 kGreen = {0.12, 0.5, 0.1};
constexpr vec3 kStone = {0.6, 0.58, 0.55};

double deg(double d) { return d * kPi / 180; }

Scene cornell() {
  // 4 x 3 x 3.5 m box open at the front, camera outside looking in
  auto scene = Scene{};
  auto x0 = -2.0, x1 = 2.0, y1 = 3.0, z0 = -2.3, z1 = 1.2;
  auto w = x1 - x0, d = z1 - z0;
  scene.meshes.push_back(make_quad({x0, 0, z1}, {w, 0, 0}, {0, 0, -d}, 8, 7, kWhite));       // floor
  scene.meshes.push_back(make_quad({x0, y1, z0}, {w, 0, 0}, {0, 0, d}, 8, 7, kWhite));       // ceiling
  scene.meshes.push_back(make_quad({x0, 0, z0}, {w, 0, 0}, {0, y1, 0}, 8, 6, kWhite));       // back
  scene.meshes.push_back(make_quad({x0, 0, z1}, {0, 0, -d}, {0, y1, 0}, 7, 6, kRed));        // left
  scene.meshes.push_back(make_quad({x1, 0, z0}, {0, 0, d}, {0, y1, 0}, 7, 6, kGreen));       // right
  scene.meshes.push_back(make_box({-0.75, 0.8, -1.1}, {0.35, 0.8, 0.35}, 0.3, kWhite, 2));   // tall
  scene.meshes.push_back(make_box({0.7, 0.35, -0.4}, {0.4, 0.35, 0.4}, -0.3, kWhite, 2));    // short
  scene.meshes.push_back(make_sphere({0.7, 1.05, -0.4}, 0.35, 32, 16, kWhite));
  scene.meshes.push_back(make_sphere({-1.3, 0.25, 0.1}, 0.25, 24, 12, kWhite));
  scene.lights.push_back({{0, 2.85, -0.5}, {3, 3, 3}});
  scene.camera = look_at({0, 1.5, 4.6}, {0, 1.3, -2.3}, {0, 1, 0}, deg(45), 256, 256);
  return scene;
}

Scene hall() {
  // 24 x 44 m hall open to the sky, 4 x 8 grid of finely tessellated columns
  auto scene = Scene{};
  auto x0 = -12.0, x1 = 12.0, y1 = 9.0, z0 = -40.0, z1 = 4.0;
  auto w = x1 - x0, d = z1 - z0;
  scene.meshes.push_back(make_quad({x0, 0, z1}, {w, 0, 0}, {0, 0, -d}, 24, 44, kStone));
  scene.meshes.push_back(make_quad({x0, 0, z0}, {w, 0, 0}, {0, y1, 0}, 12, 3, kWhite));
  scene.meshes.push_back(make_quad({x1, 0, z1}, {-w, 0, 0}, {0, y1, 0}, 12, 3, kWhite));
  scene.meshes.push_back(make_quad({x0, 0, z1}, {0, 0, -d}, {0, y1, 0}, 22, 3, kWhite));
  scene.meshes.push_back(make_quad({x1, 0, z0}, {0, 0, d}, {0, y1, 0}, 22, 3, kWhite));
  for (int i = 0; i < 4; i++)
    for (int k = 0; k < 8; k++) {
      auto x = -7.5 + 5.0 * i, z = -1.0 - 5.0 * k;
      scene.meshes.push_back(make_cylinder({x, 0, z}, 0.4, y1, 48, 24, kStone));
      scene.meshes.push_back(make_box({x, 0.15, z}, {0.6, 0.15, 0.6}, 0, kStone, 2));  // plinth
    }
  // clutter between the columns: benches, urns
  for (int k = 0; k < 7; k++) {
    auto z = -3.5 - 5.0 * k;
    scene.meshes.push_back(make_box({-5.0, 0.25, z}, {0.9, 0.25, 0.3}, 0.1 * k, kWhite, 3));
    scene.meshes.push_back(make_box({5.0, 0.25, z}, {0.9, 0.25, 0.3}, -0.1 * k, kWhite, 3));
    scene.meshes.push_back(make_sphere({-10.0, 0.6, z}, 0.6, 48, 24, kRed));
    scene.meshes.push_back(make_sphere({10.0, 0.6, z}, 0.6, 48, 24, kGreen));
  }
  // cafe tables and chairs in the foreground
  for (int k = 0; k < 4; k++)
    for (auto x : {-1.3, 1.4}) {
      auto z   = -0.5 - 3.0 * k + (x > 0 ? 1.2 : 0.0);
      auto yaw = 0.35 * k + x;
      scene.meshes.push_back(make_table({x, 0, z}, yaw, kWhite));
      scene.meshes.push_back(make_chair({x + 0.55, 0, z + 0.1}, yaw - 1.4, kRed));
      scene.meshes.push_back(make_chair({x - 0.5, 0, z - 0.2}, yaw + 1.7, kRed));
    }
  // evergreen canopy trained over a pergola spanning the column rows
  scene.foliage.push_back({{{-9, 5.5, -37}, {9, 8.5, -2}}, 3000000, 0.1, 0.025, 17, kGreen});
  scene.lights.push_back({{0, 3.2, -10}, {40, 40, 40}});
  scene.camera = look_at({0.3, 1.7, 2.5}, {0, -5, -30}, {0, 1, 0}, deg(55), 256, 256);
  return scene;
}

Scene fin() {
  // floor and back wall; a thin fin hangs 0.4 m below the light
  auto scene = Scene{};
  scene.meshes.push_back(make_quad({-4, 0, 4}, {8, 0, 0}, {0, 0, -8}, 8, 8, kWhite));
  scene.meshes.push_back(make_quad({-4, 0, -4}, {8, 0, 0}, {0, 5, 0}, 8, 5, kWhite));
  scene.meshes.push_back(make_box({0.05, 4.1, 0.03}, {0.1, 0.01, 0.07}, 0.2, kWhite));
  // slim hanger from the ceiling height down to the fin
  scene.meshes.push_back(make_box({0.05, 4.7, -0.6}, {0.01, 0.6, 0.01}, 0, kWhite));
  scene.lights.push_back({{0, 4.5, 0}, {12, 12, 12}});
  scene.camera = look_at({0.6, 2.6, 2.4}, {0.3, 0, -0.2}, {0, 1, 0}, deg(60), 256, 256);
  return scene;
}

Scene contact() {
  // a 0.4 m tile with a block and a backstop; every surface lies within
  // ~0.6 m of every other
  auto scene = Scene{};
  scene.meshes.push_back(make_quad({-0.2, 0, 0.2}, {0.4, 0, 0}, {0, 0, -0.4}, 4, 4, kWhite));
  scene.meshes.push_back(make_quad({-0.2, 0, -0.2}, {0.4, 0, 0}, {0, 0.25, 0}, 4, 3, kRed));
  scene.meshes.push_back(make_box({0.04, 0.08, -0.03}, {0.08, 0.08, 0.08}, 0.4, kWhite));
  scene.lights.push_back({{0, 0.8, 0.4}, {1, 1, 1}});
  scene.camera = look_at({0.0, 0.55, 0.7}, {0, 0.04, -0.04}, {0, 1, 0}, deg(50), 128, 128);
  return scene;
}

}  // namespace

std::vector<std::string> scene_names() { return {"cornell", "hall", "fin", "contact"}; }

Scene make_scene(const std::string& name) {
  if (name == "cornell") return cornell();
  if (name == "hall") return hall();
  if (name == "fin") return fin();
  if (name == "contact") return contact();
  throw ConfigError("unknown scene '" + name + "' (expected cornell, hall, fin or contact)");
}

}  // namespace splitrt
