#pragma once

#include <cstdint>
#include <optional>

#include "splitrt/math.hpp"

namespace splitrt {

enum class QueryFlag { ClosestHit, AnyHit };
enum class TracerKind { Exact, Field };

// A ray query (o, d, t_min, t_max, f): intersections with t in the closed
// interval [t_min, t_max] along o + t * d.
struct RayQuery {
  vec3      origin;
  vec3      direction;  // unit length
  double    t_min = 0;
  double    t_max = kInf;
  QueryFlag flag  = QueryFlag::ClosestHit;

  vec3 at(double t) const { return origin + direction * t; }
  // Throws Error when t_min > t_max or the direction is not unit length.
  void validate() const;
};

struct HitResult {
  double                       t = 0;
  vec3                         point;
  vec3                         normal;  // unit, facing the ray origin
  TracerKind                   source = TracerKind::Exact;
  std::optional<std::uint32_t> primitive;
};

// Portable work counters standing in for GPU timings.
struct WorkStats {
  std::uint64_t triangle_tests     = 0;
  std::uint64_t bvh_node_visits    = 0;
  std::uint64_t sphere_trace_steps = 0;
  std::uint64_t sphere_trace_exhausted = 0;
  std::uint64_t rays               = 0;
  double        wall_time          = 0;  // seconds, informational only

  WorkStats& operator+=(const WorkStats& o) {
    triangle_tests += o.triangle_tests;
    bvh_node_visits += o.bvh_node_visits;
    sphere_trace_steps += o.sphere_trace_steps;
    sphere_trace_exhausted += o.sphere_trace_exhausted;
    rays += o.rays;
    wall_time += o.wall_time;
    return *this;
  }

  // triangle_tests + alpha * sphere_trace_steps
  double work_score(double alpha = 1) const {
    return static_cast<double>(triangle_tests) + alpha * static_cast<double>(sphere_trace_steps);
  }
};

}  // namespace splitrt
