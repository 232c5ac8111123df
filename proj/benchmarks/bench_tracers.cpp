#include <benchmark/benchmark.h>

#include <random>

#include "splitrt/bvh.hpp"
#include "splitrt/distance_field.hpp"
#include "splitrt/procedural.hpp"
#include "splitrt/sphere_tracer.hpp"
#include "splitrt/split_query.hpp"

using namespace splitrt;

namespace {

struct Fixture {
  Scene                 scene = make_scene("cornell");
  TriangleMesh          mesh  = scene.merged();
  Bvh                   bvh   = build_bvh(mesh);
  CascadedDistanceField field = build_cascades(mesh, scene.camera.position, FieldConfig{});
  std::vector<RayQuery> queries;

  Fixture() {
    auto rng  = std::mt19937_64{1};
    auto n    = std::normal_distribution<double>{};
    auto u    = std::uniform_real_distribution<double>{0, 1};
    auto box  = compute_bounds(mesh);
    for (int i = 0; i < 4096; i++) {
      auto o = box.min + vec3{u(rng), u(rng), u(rng)} * box.extent();
      auto d = normalize(vec3{n(rng), n(rng), n(rng)});
      queries.push_back({o, d, 0.0, 10.0, QueryFlag::ClosestHit});
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_BuildBvh(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_bvh(f.mesh));
}

void BM_ExactClosest(benchmark::State& state) {
  auto& f     = fixture();
  auto  stats = WorkStats{};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(intersect_closest(f.bvh, f.queries[i++ % f.queries.size()], stats));
}

void BM_BuildCascades(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(build_cascades(f.mesh, f.scene.camera.position, FieldConfig{}));
}

void BM_SphereTrace(benchmark::State& state) {
  auto& f      = fixture();
  auto  stats  = WorkStats{};
  auto  params = SphereTraceParams{};
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sphere_trace(f.field, f.queries[i++ % f.queries.size()], params, stats));
}

void BM_ComputeSplits(benchmark::State& state) {
  auto& f   = fixture();
  auto  ctx = SplitContext{SplitKind::Shadow, 8, 10};
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_splits(f.queries[i++ % f.queries.size()], f.field, ctx));
}

}  // namespace

BENCHMARK(BM_BuildBvh)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactClosest);
BENCHMARK(BM_BuildCascades)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SphereTrace);
BENCHMARK(BM_ComputeSplits);
BENCHMARK_MAIN();
