#include "splitrt/harness.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "splitrt/errors.hpp"

namespace splitrt {

using json = nlohmann::json;

std::string mode_name(EngineMode mode) {
  switch (mode) {
    case EngineMode::ExactOnly: return "exact_only";
    case EngineMode::Combined: return "combined";
    case EngineMode::FieldOnly: return "field_only";
  }
  return "unknown";
}

EngineMode parse_mode(const std::string& name) {
  if (name == "exact_only") return EngineMode::ExactOnly;
  if (name == "combined") return EngineMode::Combined;
  if (name == "field_only") return EngineMode::FieldOnly;
  throw ConfigError("unknown mode '" + name + "' (expected exact_only, combined or field_only)");
}

std::string pass_name(PassKind pass) { return pass == PassKind::AO ? "ao" : "shadow"; }

PassKind parse_pass(const std::string& name) {
  if (name == "ao") return PassKind::AO;
  if (name == "shadow") return PassKind::Shadow;
  throw ConfigError("unknown pass '" + name + "' (expected ao or shadow)");
}

// -----------------------------------------------------------------------------
// CONFIG
// -----------------------------------------------------------------------------

void RunConfig::validate() const {
  if (scene.empty()) throw ConfigError("config has no scene");
  if (!std::filesystem::exists(scene)) throw ConfigError("scene file not found: " + scene.string());
  if (!reference.empty() && !std::filesystem::exists(reference))
    throw ConfigError("reference image not found: " + reference.string());
  if (spp < 1) throw ConfigError("spp must be at least 1");
  if (!(t_ao > 0)) throw ConfigError("t_ao must be positive");
  if (!(normal_bias_factor >= 0)) throw ConfigError("normal_bias_factor must be non-negative");
  if (!(light_epsilon >= 0)) throw ConfigError("light_epsilon must be non-negative");
  if (resolution && (resolution->first < 1 || resolution->second < 1))
    throw ConfigError("resolution must be positive");
  if (camera) camera->validate();
  field.validate();
  sphere.validate();
  SplitContext{SplitKind::Occlusion, multiplier, t_ao}.validate();
}

FieldConfig RunConfig::field_for(EngineMode m) const {
  return m == EngineMode::FieldOnly && halve_field_only ? field.halved() : field;
}

RenderSettings RunConfig::settings_for(EngineMode m) const {
  auto s = RenderSettings{};
  s.mode          = m;
  // shared by every mode so all three trace from identical origins
  s.normal_bias   = normal_bias_factor * field.finest_voxel;
  s.light_epsilon = light_epsilon;
  s.ao_falloff    = ao_falloff;
  s.multiplier    = multiplier;
  s.t_ao          = t_ao;
  s.sphere        = sphere;
  return s;
}

namespace {

vec3 read_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto& [key, value] : j.items()) {
    auto known = false;
    for (auto* k : keys) known = known || key == k;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  auto path = std::filesystem::path{p};
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  auto j = json{};
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto c = RunConfig{};
  try {
    reject_unknown(j, {"scene", "name", "pass", "mode", "spp", "seed", "t_ao", "split", "field",
        "sphere_trace", "render", "camera", "reference", "output_dir"}, "config");
    if (j.contains("scene")) c.scene = resolve(base, j["scene"].get<std::string>());
    c.name = j.value("name", c.name);
    if (j.contains("pass")) c.pass = parse_pass(j["pass"].get<std::string>());
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    c.spp  = j.value("spp", c.spp);
    c.seed = j.value("seed", c.seed);
    c.t_ao = j.value("t_ao", c.t_ao);
    if (j.contains("split")) {
      auto& s = j["split"];
      reject_unknown(s, {"multiplier"}, "split");
      c.multiplier = s.value("multiplier", c.multiplier);
    }
    if (j.contains("field")) {
      auto& f = j["field"];
      reject_unknown(f, {"cascade_count", "cascade_resolution", "finest_voxel_m", "halve_field_only"},
          "field");
      c.field.cascade_count      = f.value("cascade_count", c.field.cascade_count);
      c.field.cascade_resolution = f.value("cascade_resolution", c.field.cascade_resolution);
      c.field.finest_voxel       = f.value("finest_voxel_m", c.field.finest_voxel);
      c.halve_field_only         = f.value("halve_field_only", c.halve_field_only);
    }
    if (j.contains("sphere_trace")) {
      auto& s = j["sphere_trace"];
      reject_unknown(s, {"hit_epsilon_factor", "max_steps", "min_step_factor"}, "sphere_trace");
      c.sphere.hit_epsilon_factor = s.value("hit_epsilon_factor", c.sphere.hit_epsilon_factor);
      c.sphere.max_steps          = s.value("max_steps", c.sphere.max_steps);
      c.sphere.min_step_factor    = s.value("min_step_factor", c.sphere.min_step_factor);
    }
    if (j.contains("render")) {
      auto& r = j["render"];
      reject_unknown(r, {"normal_bias_factor", "light_epsilon", "ao_falloff", "resolution"}, "render");
      c.normal_bias_factor = r.value("normal_bias_factor", c.normal_bias_factor);
      c.light_epsilon      = r.value("light_epsilon", c.light_epsilon);
      c.ao_falloff         = r.value("ao_falloff", c.ao_falloff);
      if (r.contains("resolution")) {
        auto res = r["resolution"].get<std::vector<int>>();
        if (res.size() != 2) throw ConfigError("render.resolution must be [width, height]");
        c.resolution = std::pair{res[0], res[1]};
      }
    }
    if (j.contains("camera")) {
      auto& k = j["camera"];
      reject_unknown(k, {"position", "look_at", "forward", "up", "fov_y"}, "camera");
      auto position = read_vec3(k.at("position"), "camera position");
      auto up       = k.contains("up") ? read_vec3(k["up"], "camera up") : vec3{0, 1, 0};
      auto fov      = k.value("fov_y", kPi / 3);
      c.camera      = k.contains("look_at")
                          ? look_at(position, read_vec3(k["look_at"], "camera look_at"), up, fov, 256, 256)
                          : Camera{position, normalize(read_vec3(k.at("forward"), "camera forward")),
                                normalize(up), fov, 256, 256};
    }
    if (j.contains("reference")) c.reference = resolve(base, j["reference"].get<std::string>());
    if (j.contains("output_dir")) c.output_dir = resolve(base, j["output_dir"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  auto file = std::ifstream{path};
  if (!file) throw ConfigError("config file not found: " + path.string());
  auto text = std::stringstream{};
  text << file.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

// -----------------------------------------------------------------------------
// ENGINE
// -----------------------------------------------------------------------------

Engine::Engine(Scene scene) : scene_(std::move(scene)) {
  mesh_   = scene_.merged();
  albedo_ = scene_.triangle_albedo();
  bvh_    = build_bvh(mesh_);
  gbuffer_ = primary_visibility(albedo_, bvh_, scene_.camera, &primary_stats_);
}

const CascadedDistanceField& Engine::field(const FieldConfig& config) {
  config.validate();
  auto key = std::tuple{config.cascade_count, config.cascade_resolution, config.finest_voxel};
  auto it  = fields_.find(key);
  if (it == fields_.end())
    it = fields_.emplace(key, build_cascades(mesh_, scene_.camera.position, config)).first;
  return it->second;
}

RenderOutput Engine::render(const RunConfig& config, std::optional<EngineMode> mode) {
  auto m        = mode.value_or(config.mode);
  auto settings = config.settings_for(m);
  auto& df      = field(config.field_for(m));
  auto out      = RenderOutput{};
  out.primary   = primary_stats_;
  auto start    = std::chrono::steady_clock::now();
  if (config.pass == PassKind::AO) {
    auto acc = Accumulator{};
    for (int frame = 0; frame < config.spp; frame++) {
      auto r = ao_pass(gbuffer_, bvh_, df, settings, config.seed, static_cast<std::uint64_t>(frame));
      acc    = accumulate(std::move(acc), r.image);
      out.pass += r.total;
    }
    out.image = acc.image();
  } else {
    // point lights make every frame identical, so one is traced
    auto r         = shadow_pass(gbuffer_, scene_.lights, bvh_, df, settings);
    out.image      = std::move(r.image);
    out.pass       = r.total;
    out.visibility = std::move(r.visibility);
  }
  out.pass.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Scene prepare_scene(const RunConfig& config) {
  if (!std::filesystem::exists(config.scene))
    throw ConfigError("scene file not found: " + config.scene.string());
  auto scene = load_scene(config.scene);
  if (config.camera) {
    auto w = scene.camera.width, h = scene.camera.height;
    scene.camera        = *config.camera;
    scene.camera.width  = w;
    scene.camera.height = h;
  }
  if (config.resolution) {
    scene.camera.width  = config.resolution->first;
    scene.camera.height = config.resolution->second;
  }
  scene.camera.validate();
  return scene;
}

// -----------------------------------------------------------------------------
// RUN / COMPARE
// -----------------------------------------------------------------------------

std::string stats_json(const WorkStats& s, const std::string& stage, const RunConfig& config,
    EngineMode mode) {
  auto j = json{{"stage", stage}, {"pass", pass_name(config.pass)}, {"mode", mode_name(mode)},
      {"spp", config.spp}, {"seed", config.seed}, {"multiplier", config.multiplier},
      {"triangle_tests", s.triangle_tests}, {"bvh_node_visits", s.bvh_node_visits},
      {"sphere_trace_steps", s.sphere_trace_steps},
      {"sphere_trace_exhausted", s.sphere_trace_exhausted}, {"rays", s.rays},
      {"work_score", s.work_score()}, {"wall_time", s.wall_time}};
  return j.dump();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto file = std::ofstream{path, std::ios::binary};
  if (!file) throw IoError("cannot write " + path.string());
  file << text;
  if (!file) throw IoError("write failed: " + path.string());
}

std::string stem(const RunConfig& config, EngineMode mode) {
  return config.name + "_" + pass_name(config.pass) + "_" + mode_name(mode);
}

std::string metrics_json(const ImageError& e) {
  return json{{"stage", "error"}, {"rmse", e.rmse}, {"mae", e.mae}, {"max_abs", e.max_abs}}.dump();
}

// Writes image, stats and optional error outputs for one mode.
std::vector<std::filesystem::path> write_outputs(const RunConfig& config, EngineMode mode,
    const RenderOutput& out, const Image* reference, std::optional<ImageError>& error) {
  auto dir  = config.output_dir;
  auto base = stem(config, mode);
  std::filesystem::create_directories(dir);
  auto files = std::vector<std::filesystem::path>{dir / (base + ".ppm"), dir / (base + ".stats.jsonl")};
  write_image(files[0], out.image);
  auto lines = stats_json(out.primary, "primary", config, mode) + "\n" +
               stats_json(out.pass, "pass", config, mode) + "\n";
  if (reference) {
    error = image_error(out.image, *reference);
    lines += metrics_json(*error) + "\n";
    files.push_back(dir / (base + ".error.ppm"));
    write_image(files.back(), difference_image(out.image, *reference));
  }
  write_text(files[1], lines);
  return files;
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  auto engine    = Engine{prepare_scene(config)};
  auto result    = RunResult{};
  result.output  = engine.render(config);
  auto reference = std::optional<Image>{};
  if (!config.reference.empty()) reference = read_image(config.reference);
  result.files =
      write_outputs(config, config.mode, result.output, reference ? &*reference : nullptr, result.error);
  return result;
}

std::vector<CompareRow> compare(const RunConfig& config) {
  config.validate();
  auto engine  = Engine{prepare_scene(config)};
  auto outputs = std::vector<std::pair<EngineMode, RenderOutput>>{};
  for (auto m : {EngineMode::ExactOnly, EngineMode::Combined, EngineMode::FieldOnly})
    outputs.emplace_back(m, engine.render(config, m));
  auto reference = config.reference.empty() ? outputs[0].second.image : read_image(config.reference);

  auto rows = std::vector<CompareRow>{};
  for (auto& [m, out] : outputs) {
    auto error = std::optional<ImageError>{};
    write_outputs(config, m, out, &reference, error);
    rows.push_back({m, out.pass, *error});
  }

  auto csv = std::ostringstream{};
  auto md  = std::ostringstream{};
  csv << "mode,rays,triangle_tests,bvh_node_visits,sphere_trace_steps,work_score,rmse,mae,max_abs\n";
  md << "| mode | rays | triangle tests | node visits | march steps | work score | rmse | mae |\n"
     << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  csv << std::setprecision(9);
  md << std::setprecision(6);
  for (auto& r : rows) {
    auto& s = r.stats;
    csv << mode_name(r.mode) << ',' << s.rays << ',' << s.triangle_tests << ',' << s.bvh_node_visits
        << ',' << s.sphere_trace_steps << ',' << s.work_score() << ',' << r.error.rmse << ','
        << r.error.mae << ',' << r.error.max_abs << '\n';
    md << "| " << mode_name(r.mode) << " | " << s.rays << " | " << s.triangle_tests << " | "
       << s.bvh_node_visits << " | " << s.sphere_trace_steps << " | " << s.work_score() << " | "
       << r.error.rmse << " | " << r.error.mae << " |\n";
  }
  write_text(config.output_dir / (config.name + "_compare.csv"), csv.str());
  write_text(config.output_dir / (config.name + "_compare.md"), md.str());
  return rows;
}

}  // namespace splitrt
