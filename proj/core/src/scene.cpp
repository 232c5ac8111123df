#include "splitrt/scene.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "splitrt/errors.hpp"
#include "splitrt/procedural.hpp"

namespace splitrt {

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// MESHES
// -----------------------------------------------------------------------------

TriangleMesh make_mesh(std::vector<vec3> vertices,
    std::vector<std::array<std::uint32_t, 3>> indices, vec3 albedo,
    std::vector<vec3> normals) {
  auto mesh     = TriangleMesh{};
  mesh.vertices = std::move(vertices);
  mesh.albedo   = albedo;
  if (!normals.empty() && normals.size() != mesh.vertices.size())
    throw Error("per-vertex normal count does not match vertex count");
  mesh.normals = std::move(normals);
  mesh.indices.reserve(indices.size());
  for (auto& ix : indices) {
    for (auto i : ix)
      if (i >= mesh.vertices.size())
        throw Error("triangle index " + std::to_string(i) + " out of range");
    auto tri = Triangle{mesh.vertices[ix[0]], mesh.vertices[ix[1]], mesh.vertices[ix[2]]};
    if (!(triangle_area(tri) > kDegenerateArea)) {
      mesh.dropped_degenerate++;
      continue;
    }
    mesh.indices.push_back(ix);
    mesh.face_normals.push_back(triangle_normal(tri));
  }
  return mesh;
}

Aabb compute_bounds(const TriangleMesh& mesh) {
  if (mesh.vertices.empty() || mesh.indices.empty()) throw EmptyMesh{};
  auto box = Aabb{};
  for (auto& v : mesh.vertices) box.expand(v);
  return box;
}

namespace {

bool parse_double(std::string_view token, double& value) {
  auto* first = token.data();
  auto* last  = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

bool parse_int(std::string_view token, long& value) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

// Resolves a 1-based (or negative, relative) OBJ index against the current count.
bool resolve_index(long index, std::size_t count, std::uint32_t& out) {
  if (index > 0 && static_cast<std::size_t>(index) <= count) {
    out = static_cast<std::uint32_t>(index - 1);
    return true;
  }
  if (index < 0 && static_cast<std::size_t>(-index) <= count) {
    out = static_cast<std::uint32_t>(count + index);
    return true;
  }
  return false;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text, const std::string& source, vec3 albedo) {
  auto positions = std::vector<vec3>{};
  auto normals   = std::vector<vec3>{};
  // Each OBJ corner is a (position, normal) pair; shared pairs share a vertex.
  struct Corner {
    std::uint32_t position;
    std::int64_t  normal;
  };
  auto corners   = std::vector<std::vector<Corner>>{};

  auto stream  = std::istringstream{text};
  auto line    = std::string{};
  auto line_no = std::size_t{0};
  while (std::getline(stream, line)) {
    line_no++;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tokens = std::vector<std::string_view>{};
    {
      auto view = std::string_view{line};
      while (!view.empty()) {
        auto start = view.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) break;
        view.remove_prefix(start);
        auto end = view.find_first_of(" \t\r");
        tokens.push_back(view.substr(0, end));
        if (end == std::string_view::npos) break;
        view.remove_prefix(end);
      }
    }
    if (tokens.empty()) continue;
    auto& kind = tokens[0];
    if (kind == "v" || kind == "vn") {
      if (tokens.size() < 4) throw ParseError(source, line_no, "expected 3 coordinates");
      auto p = vec3{};
      for (int k = 0; k < 3; k++)
        if (!parse_double(tokens[k + 1], p[k]))
          throw ParseError(source, line_no, "invalid number '" + std::string(tokens[k + 1]) + "'");
      (kind == "v" ? positions : normals).push_back(p);
    } else if (kind == "f") {
      if (tokens.size() < 4) throw ParseError(source, line_no, "face needs at least 3 vertices");
      auto face = std::vector<Corner>{};
      for (std::size_t k = 1; k < tokens.size(); k++) {
        auto token   = tokens[k];
        auto slash   = token.find('/');
        auto vtoken  = token.substr(0, slash);
        auto ntoken  = std::string_view{};
        if (slash != std::string_view::npos) {
          auto rest   = token.substr(slash + 1);
          auto slash2 = rest.find('/');
          if (slash2 != std::string_view::npos) ntoken = rest.substr(slash2 + 1);
        }
        long index = 0;
        auto c     = Corner{0, -1};
        if (!parse_int(vtoken, index) || !resolve_index(index, positions.size(), c.position))
          throw ParseError(source, line_no, "invalid vertex index '" + std::string(vtoken) + "'");
        if (!ntoken.empty()) {
          auto n = std::uint32_t{0};
          if (!parse_int(ntoken, index) || !resolve_index(index, normals.size(), n))
            throw ParseError(source, line_no, "invalid normal index '" + std::string(ntoken) + "'");
          c.normal = n;
        }
        face.push_back(c);
      }
      corners.push_back(std::move(face));
    }
    // other records (vt, o, g, s, usemtl, mtllib, ...) are ignored
  }

  // Normals are kept only when every corner references one.
  auto use_normals = !corners.empty();
  for (auto& face : corners)
    for (auto& c : face) use_normals = use_normals && c.normal >= 0;

  auto vertices = std::vector<vec3>{};
  auto vnormals = std::vector<vec3>{};
  auto indices  = std::vector<std::array<std::uint32_t, 3>>{};
  if (!use_normals) {
    vertices = positions;
    for (auto& face : corners)
      for (std::size_t k = 1; k + 1 < face.size(); k++)
        indices.push_back({face[0].position, face[k].position, face[k + 1].position});
  } else {
    // vertices are emitted in first-seen corner order
    auto remap  = std::map<std::pair<std::uint32_t, std::int64_t>, std::uint32_t>{};
    auto key_of = [&](const Corner& c) -> std::uint32_t {
      auto [it, inserted] = remap.try_emplace({c.position, c.normal},
          static_cast<std::uint32_t>(vertices.size()));
      if (inserted) {
        vertices.push_back(positions[c.position]);
        vnormals.push_back(normalize(normals[c.normal]));
      }
      return it->second;
    };
    for (auto& face : corners) {
      auto ids = std::vector<std::uint32_t>{};
      for (auto& c : face) ids.push_back(key_of(c));
      for (std::size_t k = 1; k + 1 < ids.size(); k++)
        indices.push_back({ids[0], ids[k], ids[k + 1]});
    }
  }

  auto mesh = make_mesh(std::move(vertices), std::move(indices), albedo, std::move(vnormals));
  if (mesh.empty()) throw EmptyMesh{};
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path, vec3 albedo) {
  auto file = std::ifstream{path, std::ios::binary};
  if (!file) throw FileNotFound(path.string());
  auto text = std::string{std::istreambuf_iterator<char>{file}, {}};
  return parse_obj(text, path.string(), albedo);
}

std::string format_obj(const TriangleMesh& mesh) {
  auto out = std::ostringstream{};
  out.precision(17);
  for (auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  auto with_normals = !mesh.normals.empty();
  for (auto& n : mesh.normals) out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
  for (auto& ix : mesh.indices) {
    out << 'f';
    for (auto i : ix) {
      out << ' ' << i + 1;
      if (with_normals) out << "//" << i + 1;
    }
    out << '\n';
  }
  return out.str();
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  auto file = std::ofstream{path, std::ios::binary};
  if (!file) throw IoError("cannot write " + path.string());
  file << format_obj(mesh);
  if (!file) throw IoError("cannot write " + path.string());
}

// -----------------------------------------------------------------------------
// CAMERA
// -----------------------------------------------------------------------------

void Camera::validate() const {
  if (!is_finite(position)) throw ConfigError("camera position must be finite");
  if (std::abs(length(forward) - 1) > 1e-6 || std::abs(length(up) - 1) > 1e-6)
    throw ConfigError("camera forward/up must be unit vectors");
  if (length(cross(forward, up)) < 1e-6) throw ConfigError("camera forward and up are parallel");
  if (!(fov_y > 0 && fov_y < kPi)) throw ConfigError("camera fov must be in (0, pi)");
  if (width < 1 || height < 1) throw ConfigError("camera resolution must be positive");
}

vec3 Camera::pixel_direction(double px, double py) const {
  auto right = normalize(cross(forward, up));
  auto upv   = cross(right, forward);
  auto h     = std::tan(fov_y / 2);
  auto w     = h * width / height;
  auto sx    = (2 * (px + 0.5) / width - 1) * w;
  auto sy    = (1 - 2 * (py + 0.5) / height) * h;
  return normalize(forward + right * sx + upv * sy);
}

Camera look_at(vec3 position, vec3 target, vec3 up, double fov_y, int width, int height) {
  auto forward = normalize(target - position);
  auto right   = normalize(cross(forward, up));
  return {position, forward, cross(right, forward), fov_y, width, height};
}

// -----------------------------------------------------------------------------
// SCENES
// -----------------------------------------------------------------------------

TriangleMesh FoliageSpec::build() const {
  auto mesh = make_foliage(region, count, half_length, width, seed, albedo);
  if (mesh.triangle_count() != static_cast<std::size_t>(count))
    throw Error("foliage produced degenerate needles; increase width or half_length");
  return mesh;
}

TriangleMesh Scene::merged() const {
  auto vertices = std::vector<vec3>{};
  auto indices  = std::vector<std::array<std::uint32_t, 3>>{};
  auto add      = [&](const TriangleMesh& mesh) {
    auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), mesh.vertices.begin(), mesh.vertices.end());
    for (auto ix : mesh.indices) indices.push_back({ix[0] + base, ix[1] + base, ix[2] + base});
  };
  for (auto& mesh : meshes) add(mesh);
  for (auto& f : foliage) add(f.build());
  auto albedo = meshes.empty() ? vec3{0.8, 0.8, 0.8} : meshes.front().albedo;
  return make_mesh(std::move(vertices), std::move(indices), albedo);
}

std::vector<vec3> Scene::triangle_albedo() const {
  auto albedo = std::vector<vec3>{};
  for (auto& mesh : meshes) albedo.insert(albedo.end(), mesh.triangle_count(), mesh.albedo);
  for (auto& f : foliage) albedo.insert(albedo.end(), static_cast<std::size_t>(f.count), f.albedo);
  return albedo;
}

namespace {

vec3 read_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json write_vec3(vec3 v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

Scene load_scene(const std::filesystem::path& path) {
  auto file = std::ifstream{path};
  if (!file) throw FileNotFound(path.string());
  auto j = json{};
  try {
    j = json::parse(file);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto base  = path.parent_path();
  auto scene = Scene{};
  try {
    for (auto& m : j.at("meshes")) {
      auto albedo = m.contains("albedo") ? read_vec3(m["albedo"], "albedo") : vec3{0.8, 0.8, 0.8};
      scene.meshes.push_back(load_obj(base / m.at("obj").get<std::string>(), albedo));
    }
    if (j.contains("foliage"))
      for (auto& f : j["foliage"]) {
        auto spec        = FoliageSpec{};
        spec.region      = {read_vec3(f.at("min"), "foliage min"), read_vec3(f.at("max"), "foliage max")};
        spec.count       = f.at("count").get<int>();
        spec.half_length = f.value("half_length", spec.half_length);
        spec.width       = f.value("width", spec.width);
        spec.seed        = f.value("seed", spec.seed);
        if (f.contains("albedo")) spec.albedo = read_vec3(f["albedo"], "albedo");
        if (spec.count < 0 || spec.region.empty() || !(spec.half_length > 0) || !(spec.width > 0))
          throw ConfigError(path.string() + ": invalid foliage entry");
        scene.foliage.push_back(spec);
      }
    if (j.contains("lights"))
      for (auto& l : j["lights"])
        scene.lights.push_back(
            {read_vec3(l.at("position"), "light position"), read_vec3(l.at("intensity"), "light intensity")});
    if (j.contains("camera")) {
      auto& c   = j["camera"];
      auto  res = c.value("resolution", std::vector<int>{256, 256});
      if (res.size() != 2) throw ConfigError("camera resolution must be [width, height]");
      auto position = read_vec3(c.at("position"), "camera position");
      auto up       = c.contains("up") ? read_vec3(c["up"], "camera up") : vec3{0, 1, 0};
      auto fov      = c.value("fov_y", kPi / 3);
      if (c.contains("look_at"))
        scene.camera = look_at(position, read_vec3(c["look_at"], "camera look_at"), up, fov, res[0], res[1]);
      else
        scene.camera = {position, normalize(read_vec3(c.at("forward"), "camera forward")), normalize(up),
            fov, res[0], res[1]};
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (auto& l : scene.lights)
    if (!is_finite(l.intensity) || min_component(l.intensity) < 0)
      throw ConfigError(path.string() + ": light intensity must be finite and non-negative");
  scene.camera.validate();
  return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& directory, const std::string& name) {
  std::filesystem::create_directories(directory);
  auto j = json{};
  j["meshes"] = json::array();
  for (std::size_t i = 0; i < scene.meshes.size(); i++) {
    auto obj = name + "_" + std::to_string(i) + ".obj";
    save_obj(scene.meshes[i], directory / obj);
    j["meshes"].push_back({{"obj", obj}, {"albedo", write_vec3(scene.meshes[i].albedo)}});
  }
  if (!scene.foliage.empty()) {
    j["foliage"] = json::array();
    for (auto& f : scene.foliage)
      j["foliage"].push_back({{"min", write_vec3(f.region.min)}, {"max", write_vec3(f.region.max)},
          {"count", f.count}, {"half_length", f.half_length}, {"width", f.width}, {"seed", f.seed},
          {"albedo", write_vec3(f.albedo)}});
  }
  j["lights"] = json::array();
  for (auto& l : scene.lights)
    j["lights"].push_back({{"position", write_vec3(l.position)}, {"intensity", write_vec3(l.intensity)}});
  auto& c     = scene.camera;
  j["camera"] = {{"position", write_vec3(c.position)}, {"forward", write_vec3(c.forward)},
      {"up", write_vec3(c.up)}, {"fov_y", c.fov_y}, {"resolution", {c.width, c.height}}};
  auto path = directory / (name + ".json");
  auto file = std::ofstream{path};
  if (!file) throw IoError("cannot write " + path.string());
  file << j.dump(2) << '\n';
}

}  // namespace splitrt
