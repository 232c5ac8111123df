#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "splitrt/image.hpp"
#include "splitrt/split_query.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// RENDER PASSES
// -----------------------------------------------------------------------------
// Ambient occlusion and direct-light shadow passes over a primary-visibility
// buffer. Work is split into 8x8 tiles; each tile owns its RNG stream and
// work counters, so results do not depend on scheduling.

inline constexpr int kTileSize = 8;

struct GBufferPixel {
  bool          hit = false;
  vec3          position;
  vec3          normal;  // geometric, facing the camera
  vec3          albedo;
  std::uint32_t primitive = 0;
};

struct GBuffer {
  int                       width  = 0;
  int                       height = 0;
  std::vector<GBufferPixel> pixels;

  const GBufferPixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Exact closest-hit primary rays over [0, inf) through each pixel center.
GBuffer primary_visibility(const std::vector<vec3>& triangle_albedo, const Bvh& bvh,
    const Camera& camera, WorkStats* stats = nullptr);

// Random stream for one tile of one frame.
class TileRng {
 public:
  TileRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t tile);
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 engine_;
};

// Cosine-weighted direction in the hemisphere around a unit normal.
vec3 hemisphere_sample(vec3 normal, double u1, double u2);
vec3 hemisphere_sample(vec3 normal, TileRng& rng);

struct RenderSettings {
  EngineMode        mode          = EngineMode::Combined;
  double            normal_bias   = 0.15;  // meters along the shading normal
  double            light_epsilon = 1e-3;  // shadow rays stop this short of the light
  bool              ao_falloff    = false; // weight hits by 1 - exp(-t / t_ao)
  double            multiplier    = 8;
  double            t_ao          = 10;
  SphereTraceParams sphere;
};

struct PassResult {
  Image                  image;
  std::vector<WorkStats> tile_stats;
  WorkStats              total;
  // shadow pass only: per pixel and light, 1 lit, 0 occluded, 255 not traced
  std::vector<std::uint8_t> visibility;
};

// One AO sample per hit pixel for the given frame; values in [0, 1], 1 = open.
PassResult ao_pass(const GBuffer& gbuffer, const Bvh& bvh, const CascadedDistanceField& field,
    const RenderSettings& settings, std::uint64_t seed, std::uint64_t frame);

// Lambertian direct light from point lights with any-hit shadow rays.
PassResult shadow_pass(const GBuffer& gbuffer, const std::vector<PointLight>& lights,
    const Bvh& bvh, const CascadedDistanceField& field, const RenderSettings& settings);

struct Accumulator {
  int                        width  = 0;
  int                        height = 0;
  std::vector<vec3>          mean;
  std::vector<std::uint32_t> count;

  Image image() const;
};

// Running-mean update. An empty accumulator takes the sample's size; otherwise
// sizes must match (DimensionMismatch).
Accumulator accumulate(Accumulator acc, const Image& sample);

}  // namespace splitrt
