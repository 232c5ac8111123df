#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "splitrt/render.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// RUN CONFIGURATION
// -----------------------------------------------------------------------------

enum class PassKind { AO, Shadow };

std::string mode_name(EngineMode mode);  // exact_only, combined, field_only
EngineMode  parse_mode(const std::string& name);
std::string pass_name(PassKind pass);
PassKind    parse_pass(const std::string& name);

struct RunConfig {
  std::filesystem::path scene;  // scene description file
  std::string           name = "run";
  PassKind              pass = PassKind::AO;
  EngineMode            mode = EngineMode::Combined;
  int                   spp  = 16;
  std::uint64_t         seed = 1;
  double                t_ao = 10;
  double                multiplier = 8;
  FieldConfig           field;
  bool                  halve_field_only = true;  // field_only runs use field.halved()
  SphereTraceParams     sphere;
  double                normal_bias_factor = 1.5;  // times field.finest_voxel
  double                light_epsilon      = 1e-3;
  bool                  ao_falloff         = false;
  std::optional<Camera> camera;                    // overrides the scene camera
  std::optional<std::pair<int, int>> resolution;   // overrides the camera size
  std::filesystem::path reference;                 // optional reference image
  std::filesystem::path output_dir = "out";

  // Throws ConfigError: missing files, spp < 1, bad numeric ranges.
  void validate() const;
  // Field configuration actually used for `mode`.
  FieldConfig field_for(EngineMode m) const;
  RenderSettings settings_for(EngineMode m) const;
};

// JSON keys mirror the CLI flags; relative paths resolve against `base`.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

// -----------------------------------------------------------------------------
// ENGINE
// -----------------------------------------------------------------------------
// Owns a scene with its BVH and primary-visibility buffer, and caches one
// distance field per field configuration.

struct RenderOutput {
  Image     image;
  WorkStats primary;  // G-buffer rays
  WorkStats pass;     // AO or shadow rays, summed over frames
  std::vector<std::uint8_t> visibility;  // shadow pass only
};

class Engine {
 public:
  explicit Engine(Scene scene);

  const Scene&        scene() const { return scene_; }
  const TriangleMesh& mesh() const { return mesh_; }
  const Bvh&          bvh() const { return bvh_; }
  const GBuffer&      gbuffer() const { return gbuffer_; }
  const WorkStats&    primary_stats() const { return primary_stats_; }

  const CascadedDistanceField& field(const FieldConfig& config);

  // Renders `config.pass` in `mode` (the config's own mode when unset). The
  // scene path, camera and output settings of the config are ignored.
  RenderOutput render(const RunConfig& config, std::optional<EngineMode> mode = std::nullopt);

 private:
  Scene                 scene_;
  TriangleMesh          mesh_;
  std::vector<vec3>     albedo_;
  Bvh                   bvh_;
  GBuffer               gbuffer_;
  WorkStats             primary_stats_;
  std::map<std::tuple<int, int, double>, CascadedDistanceField> fields_;
};

// Loads the scene and applies camera/resolution overrides.
Scene prepare_scene(const RunConfig& config);

struct RunResult {
  RenderOutput                       output;
  std::optional<ImageError>          error;  // against the reference
  std::vector<std::filesystem::path> files;
};

// Renders one configuration and writes <name>_<pass>_<mode>.ppm, a JSON-lines
// stats file and, with a reference image, an error image and metrics.
RunResult run(const RunConfig& config);

struct CompareRow {
  EngineMode mode;
  WorkStats  stats;
  ImageError error;  // against exact_only, or the configured reference
};

// Runs all three modes on one engine and writes <name>_compare.csv and
// <name>_compare.md next to the per-mode outputs.
std::vector<CompareRow> compare(const RunConfig& config);

// One JSON object per line; wall_time is the only nondeterministic field.
std::string stats_json(const WorkStats& stats, const std::string& stage, const RunConfig& config,
    EngineMode mode);

}  // namespace splitrt
