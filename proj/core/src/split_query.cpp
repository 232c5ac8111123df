#include "splitrt/split_query.hpp"

#include <algorithm>
#include <numeric>

#include "splitrt/errors.hpp"

namespace splitrt {

void RayQuery::validate() const {
  if (!(t_min <= t_max)) throw Error("ray query needs t_min <= t_max");
  if (std::abs(length(direction) - 1) > 1e-6) throw Error("ray query direction must be unit length");
  if (!is_finite(origin)) throw Error("ray query origin must be finite");
}

void SplitContext::validate() const {
  if (!(multiplier > 0)) throw ConfigError("split.multiplier must be > 0");
  if (kind == SplitKind::Occlusion && !(t_ao > 0)) throw ConfigError("t_ao must be > 0");
}

// -----------------------------------------------------------------------------
// PLANNING
// -----------------------------------------------------------------------------

namespace {

std::vector<std::size_t> order_for(const std::vector<Segment>& segments, QueryFlag flag) {
  auto order = std::vector<std::size_t>(segments.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (flag == QueryFlag::AnyHit)
    std::stable_partition(order.begin(), order.end(),
        [&](std::size_t i) { return segments[i].tracer == TracerKind::Field; });
  return order;
}

}  // namespace

SubQueryPlan compute_splits(
    const RayQuery& query, const CascadedDistanceField& field, const SplitContext& ctx) {
  auto t_min = query.t_min, t_max = query.t_max;
  auto t1 = std::clamp(
      t_min + ctx.multiplier * field.voxel_size_at(query.at(t_min)), t_min, t_max);

  auto candidates = std::vector<Segment>{};
  if (ctx.kind == SplitKind::Occlusion) {
    candidates = {{t_min, t1, TracerKind::Exact}, {t1, t_max, TracerKind::Field}};
  } else {
    auto end_voxel = std::isfinite(t_max) ? field.voxel_size_at(query.at(t_max)) : 0.0;
    auto t2        = std::clamp(t_max - ctx.multiplier * end_voxel, t1, t_max);
    if (t1 >= t2)
      candidates = {{t_min, t_max, TracerKind::Exact}};
    else
      candidates = {{t_min, t1, TracerKind::Exact}, {t1, t2, TracerKind::Field},
          {t2, t_max, TracerKind::Exact}};
  }

  auto plan = SubQueryPlan{};
  for (auto& s : candidates)
    if (s.end > s.begin) plan.segments.push_back(s);
  // a zero-length query still gets one (exact) segment
  if (plan.segments.empty()) plan.segments.push_back({t_min, t_max, TracerKind::Exact});
  plan.execution_order = order_for(plan.segments, query.flag);
  return plan;
}

void validate_plan(const SubQueryPlan& plan, const RayQuery& query) {
  auto& s = plan.segments;
  if (s.empty()) throw PlanMismatch("plan has no segments");
  if (s.front().begin != query.t_min || s.back().end != query.t_max)
    throw PlanMismatch("plan does not span [t_min, t_max]");
  for (std::size_t i = 0; i < s.size(); i++) {
    if (!(s[i].begin <= s[i].end)) throw PlanMismatch("segment with begin > end");
    if (i + 1 < s.size() && s[i].end != s[i + 1].begin)
      throw PlanMismatch("segments are not contiguous");
  }
  if (plan.execution_order != order_for(s, query.flag))
    throw PlanMismatch("execution order does not match the query flag");
}

// -----------------------------------------------------------------------------
// EXECUTION
// -----------------------------------------------------------------------------

namespace {

std::optional<HitResult> run_segment(const SubQueryPlan& plan, std::size_t index,
    const RayQuery& query, const Bvh& bvh, const CascadedDistanceField& field,
    const SphereTraceParams& params, WorkStats& stats) {
  auto& seg = plan.segments[index];
  auto  sub = query;
  sub.t_min = seg.begin;
  sub.t_max = seg.end;
  if (seg.tracer == TracerKind::Exact)
    return query.flag == QueryFlag::AnyHit ? intersect_any(bvh, sub, stats)
                                           : intersect_closest(bvh, sub, stats);
  auto last = index + 1 == plan.segments.size();
  return sphere_trace(field, sub, params, stats, last);
}

}  // namespace

std::optional<HitResult> trace_combined(const SubQueryPlan& plan, const RayQuery& query,
    const Bvh& bvh, const CascadedDistanceField& field, const SphereTraceParams& params,
    WorkStats& stats) {
  validate_plan(plan, query);
  for (auto index : plan.execution_order)
    if (auto hit = run_segment(plan, index, query, bvh, field, params, stats)) return hit;
  return std::nullopt;
}

std::optional<HitResult> trace_pure(const RayQuery& query, EngineMode mode, const Bvh& bvh,
    const CascadedDistanceField& field, const SphereTraceParams& params, WorkStats& stats) {
  if (mode == EngineMode::FieldOnly) return sphere_trace(field, query, params, stats);
  return query.flag == QueryFlag::AnyHit ? intersect_any(bvh, query, stats)
                                         : intersect_closest(bvh, query, stats);
}

std::optional<HitResult> trace_query(const RayQuery& query, EngineMode mode, const Bvh& bvh,
    const CascadedDistanceField& field, const SphereTraceParams& params, const SplitContext& ctx,
    WorkStats& stats) {
  stats.rays++;
  if (mode != EngineMode::Combined) return trace_pure(query, mode, bvh, field, params, stats);
  return trace_combined(compute_splits(query, field, ctx), query, bvh, field, params, stats);
}

}  // namespace splitrt
