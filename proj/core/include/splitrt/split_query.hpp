#pragma once

#include <optional>
#include <vector>

#include "splitrt/bvh.hpp"
#include "splitrt/distance_field.hpp"
#include "splitrt/ray.hpp"
#include "splitrt/sphere_tracer.hpp"

namespace splitrt {

// -----------------------------------------------------------------------------
// SPLIT QUERIES
// -----------------------------------------------------------------------------
// One ray query is cut into mutually exclusive t-intervals, each resolved by
// either the exact BVH tracer or the distance-field sphere tracer. Exact
// segments are closed at both ends; a field segment excludes its end when
// that end is shared with a following segment.

enum class EngineMode { ExactOnly, Combined, FieldOnly };

struct Segment {
  double     begin = 0;
  double     end   = 0;
  TracerKind tracer = TracerKind::Exact;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SubQueryPlan {
  std::vector<Segment>     segments;         // ascending t, contiguous
  std::vector<std::size_t> execution_order;  // permutation of segment indices
};

enum class SplitKind { Occlusion, Shadow };

struct SplitContext {
  SplitKind kind       = SplitKind::Occlusion;
  double    multiplier = 8;
  double    t_ao       = 10;  // occlusion only

  // Throws ConfigError.
  void validate() const;
};

// Occlusion: Exact [t_min, t_1], Field [t_1, t_max] with
//   t_1 = clamp(t_min + multiplier * voxel_size_at(o + t_min d), t_min, t_max).
// Shadow: additionally t_2 = clamp(t_max - multiplier * voxel_size_at(o + t_max d), t_1, t_max)
//   and Exact [t_min, t_1], Field [t_1, t_2], Exact [t_2, t_max]; a single
//   Exact segment when t_1 >= t_2.
// Zero-length segments are dropped. AnyHit plans run field segments first.
SubQueryPlan compute_splits(
    const RayQuery& query, const CascadedDistanceField& field, const SplitContext& ctx);

// Throws PlanMismatch unless the plan tiles [t_min, t_max] and its execution
// order is a permutation obeying the flag's ordering rule.
void validate_plan(const SubQueryPlan& plan, const RayQuery& query);

// Runs the segments: ClosestHit in ascending t stopping at the first segment
// with a hit, AnyHit in execution order stopping at the first hit.
std::optional<HitResult> trace_combined(const SubQueryPlan& plan, const RayQuery& query,
    const Bvh& bvh, const CascadedDistanceField& field, const SphereTraceParams& params,
    WorkStats& stats);

// Whole interval with a single tracer and no plan.
std::optional<HitResult> trace_pure(const RayQuery& query, EngineMode mode, const Bvh& bvh,
    const CascadedDistanceField& field, const SphereTraceParams& params, WorkStats& stats);

// Dispatches on the mode: pure tracers, or compute_splits + trace_combined.
std::optional<HitResult> trace_query(const RayQuery& query, EngineMode mode, const Bvh& bvh,
    const CascadedDistanceField& field, const SphereTraceParams& params, const SplitContext& ctx,
    WorkStats& stats);

}  // namespace splitrt
