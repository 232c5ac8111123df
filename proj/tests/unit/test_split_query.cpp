#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splitrt/errors.hpp"
#include "splitrt/split_query.hpp"

using namespace splitrt;

namespace {

RayQuery query(vec3 o, vec3 d, double a, double b, QueryFlag f = QueryFlag::ClosestHit) {
  return {o, normalize(d), a, b, f};
}

const CascadedDistanceField& empty_field() {
  static auto field = build_cascades(TriangleMesh{}, {0, 0, 0}, FieldConfig{});
  return field;
}

SplitContext occlusion(double m = 8, double t_ao = 100) { return {SplitKind::Occlusion, m, t_ao}; }
SplitContext shadow(double m = 8) { return {SplitKind::Shadow, m, 0}; }

double field_length(const SubQueryPlan& plan) {
  auto total = 0.0;
  for (auto& s : plan.segments)
    if (s.tracer == TracerKind::Field) total += s.end - s.begin;
  return total;
}

}  // namespace

TEST(ComputeSplits, OcclusionFinestCascade) {
  auto q    = query({0, 0, 0}, {0, 1, 0}, 0, 100);
  auto plan = compute_splits(q, empty_field(), occlusion());
  ASSERT_EQ(plan.segments.size(), 2u);
  EXPECT_EQ(plan.segments[0], (Segment{0, 0.8, TracerKind::Exact}));
  EXPECT_EQ(plan.segments[1], (Segment{0.8, 100, TracerKind::Field}));
  EXPECT_EQ(plan.execution_order, (std::vector<std::size_t>{0, 1}));
}

TEST(ComputeSplits, OcclusionClampsToExactOnly) {
  auto q    = query({0, 0, 0}, {0, 1, 0}, 0, 0.5);
  auto plan = compute_splits(q, empty_field(), occlusion(8, 0.5));
  ASSERT_EQ(plan.segments.size(), 1u);
  EXPECT_EQ(plan.segments[0], (Segment{0, 0.5, TracerKind::Exact}));
}

TEST(ComputeSplits, ShadowBothEndsFinest) {
  auto q    = query({0, 0, 0}, {1, 0, 0}, 0, 3, QueryFlag::AnyHit);
  auto plan = compute_splits(q, empty_field(), shadow());
  ASSERT_EQ(plan.segments.size(), 3u);
  EXPECT_EQ(plan.segments[0], (Segment{0, 0.8, TracerKind::Exact}));
  EXPECT_EQ(plan.segments[1].tracer, TracerKind::Field);
  EXPECT_DOUBLE_EQ(plan.segments[1].begin, 0.8);
  EXPECT_DOUBLE_EQ(plan.segments[1].end, 2.2);
  EXPECT_EQ(plan.segments[2].tracer, TracerKind::Exact);
  EXPECT_EQ(plan.execution_order, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(ComputeSplits, ShortShadowRayCollapses) {
  auto q    = query({0, 0, 0}, {1, 0, 0}, 0, 1.5, QueryFlag::AnyHit);
  auto plan = compute_splits(q, empty_field(), shadow());
  ASSERT_EQ(plan.segments.size(), 1u);
  EXPECT_EQ(plan.segments[0], (Segment{0, 1.5, TracerKind::Exact}));
}

TEST(ComputeSplits, CoarseVoxelOutsideAllCascades) {
  auto q    = query({500, 0, 0}, {1, 0, 0}, 0, 100);
  auto plan = compute_splits(q, empty_field(), occlusion());
  EXPECT_DOUBLE_EQ(plan.segments[0].end, 8 * 1.6);
}

TEST(ComputeSplits, RandomPlansTileAndOrder) {
  auto rng = std::mt19937_64{5};
  auto u   = std::uniform_real_distribution<double>{0, 1};
  for (int i = 0; i < 10000; i++) {
    auto o    = oracle::random_point(rng, {{-80, -80, -80}, {80, 80, 80}});
    auto a    = u(rng) < 0.1 ? 0.0 : 5 * u(rng);
    auto b    = a + (u(rng) < 0.05 ? 0.0 : 150 * u(rng) * u(rng));
    auto flag = u(rng) < 0.5 ? QueryFlag::ClosestHit : QueryFlag::AnyHit;
    auto q    = query(o, oracle::random_unit(rng), a, b, flag);
    for (auto ctx : {occlusion(0.5 + 40 * u(rng)), shadow(0.5 + 40 * u(rng))}) {
      auto plan = compute_splits(q, empty_field(), ctx);
      ASSERT_NO_THROW(validate_plan(plan, q));
      auto& s = plan.segments;
      EXPECT_EQ(s.front().begin, a);
      EXPECT_EQ(s.back().end, b);
      for (std::size_t k = 0; k + 1 < s.size(); k++) EXPECT_EQ(s[k].end, s[k + 1].begin);
      auto seen_exact = false;
      for (std::size_t k = 0; k < plan.execution_order.size(); k++) {
        auto& seg = s[plan.execution_order[k]];
        if (flag == QueryFlag::ClosestHit) EXPECT_EQ(plan.execution_order[k], k);
        if (seg.tracer == TracerKind::Exact) seen_exact = true;
        else EXPECT_FALSE(seen_exact && flag == QueryFlag::AnyHit);
      }
    }
  }
}

TEST(ComputeSplits, MultiplierShrinksFieldSegment) {
  auto rng = std::mt19937_64{6};
  for (int i = 0; i < 500; i++) {
    auto q    = query(oracle::random_point(rng, {{-20, -20, -20}, {20, 20, 20}}),
        oracle::random_unit(rng), 0, 60);
    for (auto kind : {SplitKind::Occlusion, SplitKind::Shadow}) {
      auto last = kInf;
      for (double m : {2.0, 8.0, 32.0}) {
        auto len = field_length(compute_splits(q, empty_field(), {kind, m, 60}));
        EXPECT_LE(len, last);
        last = len;
      }
    }
  }
}

TEST(ValidatePlan, RejectsBrokenPlans) {
  auto q    = query({0, 0, 0}, {1, 0, 0}, 0, 10);
  auto good = compute_splits(q, empty_field(), occlusion());
  auto gap  = good;
  gap.segments[1].begin += 0.1;
  EXPECT_THROW(validate_plan(gap, q), PlanMismatch);
  auto short_plan = good;
  short_plan.segments[1].end = 9;
  EXPECT_THROW(validate_plan(short_plan, q), PlanMismatch);
  auto swapped            = good;
  swapped.execution_order = {1, 0};
  EXPECT_THROW(validate_plan(swapped, q), PlanMismatch);
  auto bvh = build_bvh(oracle::wall_z(5));
  auto st  = WorkStats{};
  EXPECT_THROW(trace_combined(gap, q, bvh, empty_field(), {}, st), PlanMismatch);
  EXPECT_THROW((SplitContext{SplitKind::Occlusion, 0, 10}.validate()), ConfigError);
  EXPECT_THROW((SplitContext{SplitKind::Occlusion, 8, 0}.validate()), ConfigError);
  EXPECT_THROW(query({0, 0, 0}, {1, 0, 0}, 2, 1).validate(), Error);
}

TEST(TraceCombined, SingleExactSegmentEqualsClosest) {
  auto mesh = oracle::concat({oracle::wall_z(1, 5), oracle::wall_z(3, 5)});
  auto bvh  = build_bvh(mesh);
  auto q    = query({0.1, 0.2, 0}, {0.1, 0, 1}, 0, 10);
  auto plan = SubQueryPlan{{{0, 10, TracerKind::Exact}}, {0}};
  auto s1 = WorkStats{}, s2 = WorkStats{}, s3 = WorkStats{};
  auto a  = trace_combined(plan, q, bvh, empty_field(), {}, s1);
  auto b  = intersect_closest(bvh, q, s2);
  auto c  = trace_pure(q, EngineMode::ExactOnly, bvh, empty_field(), {}, s3);
  ASSERT_TRUE(a && b && c);
  EXPECT_EQ(a->t, b->t);
  EXPECT_EQ(c->t, b->t);
  EXPECT_EQ(s1.triangle_tests, s2.triangle_tests);
}

TEST(TraceCombined, NearWallFromExactSegment) {
  auto mesh  = oracle::wall_z(0.5, 5);
  auto bvh   = build_bvh(mesh);
  auto field = build_cascades(mesh, {0, 0, 0}, FieldConfig{});
  auto q     = query({0, 0, 0}, {0, 0, 1}, 0, 100);
  auto plan  = compute_splits(q, field, occlusion());
  EXPECT_DOUBLE_EQ(plan.segments[0].end, 0.8);
  auto stats = WorkStats{};
  auto hit   = trace_combined(plan, q, bvh, field, {}, stats);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->source, TracerKind::Exact);
  EXPECT_DOUBLE_EQ(hit->t, 0.5);
  EXPECT_EQ(stats.sphere_trace_steps, 0u);
}

TEST(TraceCombined, FarWallFromFieldSegment) {
  auto mesh  = oracle::wall_z(50, 60);
  auto bvh   = build_bvh(mesh);
  auto field = build_cascades(mesh, {0, 0, 0}, FieldConfig{});
  auto q     = query({0, 0, 0}, {0, 0, 1}, 0, 100);
  auto stats = WorkStats{};
  auto hit   = trace_combined(compute_splits(q, field, occlusion()), q, bvh, field, {}, stats);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->source, TracerKind::Field);
  EXPECT_NEAR(hit->t, 50, field.voxel_size_at({0, 0, 50}));
  EXPECT_GT(stats.sphere_trace_steps, 0u);
}

TEST(TracePure, FieldOnlyOnEmptyFieldMisses) {
  auto bvh   = build_bvh(oracle::wall_z(2));
  auto stats = WorkStats{};
  EXPECT_FALSE(
      trace_pure(query({0, 0, 0}, {0, 0, 1}, 0, 10), EngineMode::FieldOnly, bvh, empty_field(), {}, stats));
  EXPECT_EQ(stats.triangle_tests, 0u);
}

TEST(TracePure, ExactOnlyMatchesBruteForce) {
  auto rng  = std::mt19937_64{71};
  auto mesh = oracle::random_soup(rng, 2000, {{-3, -3, -3}, {3, 3, 3}}, 0.4);
  auto bvh  = build_bvh(mesh);
  for (int i = 0; i < 300; i++) {
    auto o     = oracle::random_point(rng, {{-4, -4, -4}, {4, 4, 4}});
    auto d     = oracle::random_unit(rng);
    auto stats = WorkStats{};
    auto got   = trace_pure(query(o, d, 0, 8), EngineMode::ExactOnly, bvh, empty_field(), {}, stats);
    auto want  = oracle::closest(mesh, o, d, 0, 8);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) EXPECT_LE(std::abs(got->t - *want), 1e-9 * *want);
  }
}

TEST(TraceCombined, ExactSegmentFidelityAndFlagAgreement) {
  auto rng   = std::mt19937_64{72};
  auto mesh  = oracle::random_soup(rng, 3000, {{-4, -4, -4}, {4, 4, 4}}, 0.3);
  auto bvh   = build_bvh(mesh);
  auto field = build_cascades(mesh, {0, 0, 0}, FieldConfig{});
  int  near  = 0;
  for (int i = 0; i < 2000; i++) {
    auto o = oracle::random_point(rng, {{-3, -3, -3}, {3, 3, 3}});
    auto d = oracle::random_unit(rng);
    for (auto ctx : {occlusion(), shadow()}) {
      auto q    = query(o, d, 0, 6);
      auto plan = compute_splits(q, field, ctx);
      auto st   = WorkStats{};
      auto hit  = trace_combined(plan, q, bvh, field, {}, st);
      auto want = oracle::closest(mesh, o, d, 0, 6);
      if (want && *want < plan.segments[0].end) {
        near++;
        ASSERT_TRUE(hit);
        EXPECT_EQ(hit->source, TracerKind::Exact);
        EXPECT_LE(std::abs(hit->t - *want), 1e-9 * *want);
      }
      auto any_q    = query(o, d, 0, 6, QueryFlag::AnyHit);
      auto any_plan = compute_splits(any_q, field, ctx);
      auto any      = trace_combined(any_plan, any_q, bvh, field, {}, st);
      EXPECT_EQ(any.has_value(), hit.has_value());
    }
  }
  EXPECT_GT(near, 100);
}

TEST(TraceQuery, CountsRaysAndDispatches) {
  auto mesh  = oracle::wall_z(30, 40);
  auto bvh   = build_bvh(mesh);
  auto field = build_cascades(mesh, {0, 0, 0}, FieldConfig{});
  auto q     = query({0, 0, 0}, {0, 0, 1}, 0, 100);
  auto exact = WorkStats{}, combined = WorkStats{}, pure_field = WorkStats{};
  EXPECT_TRUE(trace_query(q, EngineMode::ExactOnly, bvh, field, {}, occlusion(), exact));
  EXPECT_TRUE(trace_query(q, EngineMode::Combined, bvh, field, {}, occlusion(), combined));
  EXPECT_TRUE(trace_query(q, EngineMode::FieldOnly, bvh, field, {}, occlusion(), pure_field));
  EXPECT_EQ(exact.rays, 1u);
  EXPECT_EQ(exact.sphere_trace_steps, 0u);
  EXPECT_GT(combined.sphere_trace_steps, 0u);
  EXPECT_EQ(pure_field.triangle_tests, 0u);
}
