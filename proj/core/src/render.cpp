#include "splitrt/render.hpp"

#include "splitrt/errors.hpp"
#include "splitrt/parallel.hpp"

namespace splitrt {

namespace {

struct Tile {
  int x0, y0, x1, y1;
};

struct TileGrid {
  int width, height, tiles_x, tiles_y;

  TileGrid(int w, int h)
      : width(w), height(h), tiles_x((w + kTileSize - 1) / kTileSize),
        tiles_y((h + kTileSize - 1) / kTileSize) {}

  std::size_t count() const { return static_cast<std::size_t>(tiles_x) * tiles_y; }
  Tile        tile(std::size_t index) const {
    auto tx = static_cast<int>(index % tiles_x), ty = static_cast<int>(index / tiles_x);
    return {tx * kTileSize, ty * kTileSize, std::min(width, (tx + 1) * kTileSize),
        std::min(height, (ty + 1) * kTileSize)};
  }
};

WorkStats reduce(const std::vector<WorkStats>& tiles) {
  auto total = WorkStats{};
  for (auto& s : tiles) total += s;
  return total;
}

}  // namespace

GBuffer primary_visibility(const std::vector<vec3>& triangle_albedo, const Bvh& bvh,
    const Camera& camera, WorkStats* stats) {
  camera.validate();
  auto gbuffer   = GBuffer{camera.width, camera.height,
      std::vector<GBufferPixel>(static_cast<std::size_t>(camera.width) * camera.height)};
  auto grid      = TileGrid{camera.width, camera.height};
  auto per_tile  = std::vector<WorkStats>(grid.count());
  parallel_for(grid.count(), [&](std::size_t t) {
    auto tile = grid.tile(t);
    for (int y = tile.y0; y < tile.y1; y++)
      for (int x = tile.x0; x < tile.x1; x++) {
        auto query = RayQuery{camera.position, camera.pixel_direction(x, y), 0, kInf,
            QueryFlag::ClosestHit};
        per_tile[t].rays++;
        auto  hit = intersect_closest(bvh, query, per_tile[t]);
        auto& px  = gbuffer.pixels[static_cast<std::size_t>(y) * camera.width + x];
        if (!hit) continue;
        px.hit       = true;
        px.position  = hit->point;
        px.normal    = hit->normal;
        px.primitive = *hit->primitive;
        px.albedo    = px.primitive < triangle_albedo.size() ? triangle_albedo[px.primitive]
                                                             : vec3{0.8, 0.8, 0.8};
      }
  });
  if (stats) *stats += reduce(per_tile);
  return gbuffer;
}

// -----------------------------------------------------------------------------
// SAMPLING
// -----------------------------------------------------------------------------

TileRng::TileRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t tile) {
  auto words = std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(frame >> 32),
      static_cast<std::uint32_t>(tile), static_cast<std::uint32_t>(tile >> 32)};
  engine_.seed(words);
}

double TileRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

vec3 hemisphere_sample(vec3 normal, double u1, double u2) {
  auto r   = std::sqrt(u1);
  auto phi = 2 * kPi * u2;
  auto z   = std::sqrt(std::max(0.0, 1 - u1));
  vec3 t, b;
  orthonormal_basis(normal, t, b);
  return normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + normal * z);
}

vec3 hemisphere_sample(vec3 normal, TileRng& rng) {
  auto u1 = rng.uniform();
  auto u2 = rng.uniform();
  return hemisphere_sample(normal, u1, u2);
}

// -----------------------------------------------------------------------------
// PASSES
// -----------------------------------------------------------------------------

PassResult ao_pass(const GBuffer& gbuffer, const Bvh& bvh, const CascadedDistanceField& field,
    const RenderSettings& settings, std::uint64_t seed, std::uint64_t frame) {
  auto ctx = SplitContext{SplitKind::Occlusion, settings.multiplier, settings.t_ao};
  ctx.validate();
  auto grid   = TileGrid{gbuffer.width, gbuffer.height};
  auto result = PassResult{Image{gbuffer.width, gbuffer.height, {1, 1, 1}},
      std::vector<WorkStats>(grid.count()), {}, {}};
  parallel_for(grid.count(), [&](std::size_t t) {
    auto  tile  = grid.tile(t);
    auto  rng   = TileRng{seed, frame, t};
    auto& stats = result.tile_stats[t];
    for (int y = tile.y0; y < tile.y1; y++)
      for (int x = tile.x0; x < tile.x1; x++) {
        // draw for every pixel so streams do not depend on coverage
        auto  u1 = rng.uniform(), u2 = rng.uniform();
        auto& px = gbuffer.at(x, y);
        if (!px.hit) continue;
        auto query = RayQuery{px.position + px.normal * settings.normal_bias,
            hemisphere_sample(px.normal, u1, u2), 0, settings.t_ao, QueryFlag::ClosestHit};
        auto hit   = trace_query(query, settings.mode, bvh, field, settings.sphere, ctx, stats);
        auto value = 1.0;
        if (hit) value = settings.ao_falloff ? 1 - std::exp(-hit->t / settings.t_ao) : 0.0;
        result.image.at(x, y) = {value, value, value};
      }
  });
  result.total = reduce(result.tile_stats);
  return result;
}

PassResult shadow_pass(const GBuffer& gbuffer, const std::vector<PointLight>& lights,
    const Bvh& bvh, const CascadedDistanceField& field, const RenderSettings& settings) {
  if (lights.empty()) throw ConfigError("shadow pass needs at least one light");
  auto ctx = SplitContext{SplitKind::Shadow, settings.multiplier, settings.t_ao};
  ctx.validate();
  auto grid   = TileGrid{gbuffer.width, gbuffer.height};
  auto result = PassResult{Image{gbuffer.width, gbuffer.height},
      std::vector<WorkStats>(grid.count()), {},
      std::vector<std::uint8_t>(gbuffer.pixels.size() * lights.size(), 255)};
  parallel_for(grid.count(), [&](std::size_t t) {
    auto  tile  = grid.tile(t);
    auto& stats = result.tile_stats[t];
    for (int y = tile.y0; y < tile.y1; y++)
      for (int x = tile.x0; x < tile.x1; x++) {
        auto& px = gbuffer.at(x, y);
        if (!px.hit) continue;
        auto origin = px.position + px.normal * settings.normal_bias;
        auto color  = vec3{};
        for (std::size_t l = 0; l < lights.size(); l++) {
          auto to_light = lights[l].position - origin;
          auto dist     = length(to_light);
          if (!(dist > 0)) continue;
          auto dir    = to_light / dist;
          auto cosine = dot(px.normal, dir);
          if (cosine <= 0) continue;
          auto lit = true;
          if (dist - settings.light_epsilon > 0) {
            auto query = RayQuery{origin, dir, 0, dist - settings.light_epsilon, QueryFlag::AnyHit};
            lit = !trace_query(query, settings.mode, bvh, field, settings.sphere, ctx, stats);
          }
          auto pixel = static_cast<std::size_t>(y) * gbuffer.width + x;
          result.visibility[pixel * lights.size() + l] = lit ? 1 : 0;
          if (lit) color += px.albedo * lights[l].intensity * (cosine / (dist * dist));
        }
        result.image.at(x, y) = color;
      }
  });
  result.total = reduce(result.tile_stats);
  return result;
}

// -----------------------------------------------------------------------------
// ACCUMULATION
// -----------------------------------------------------------------------------

Image Accumulator::image() const {
  auto out   = Image{width, height};
  out.pixels = mean;
  return out;
}

Accumulator accumulate(Accumulator acc, const Image& sample) {
  if (acc.mean.empty() && acc.width == 0 && acc.height == 0) {
    acc.width  = sample.width;
    acc.height = sample.height;
    acc.mean.assign(sample.pixels.size(), {});
    acc.count.assign(sample.pixels.size(), 0);
  }
  if (acc.width != sample.width || acc.height != sample.height)
    throw DimensionMismatch("accumulator and sample sizes differ");
  for (std::size_t i = 0; i < sample.pixels.size(); i++) {
    auto n = ++acc.count[i];
    acc.mean[i] += (sample.pixels[i] - acc.mean[i]) / static_cast<double>(n);
  }
  return acc;
}

}  // namespace splitrt
