#include "splitrt/sphere_tracer.hpp"

#include "splitrt/errors.hpp"

namespace splitrt {

void SphereTraceParams::validate() const {
  if (!(hit_epsilon_factor > 0)) throw ConfigError("sphere_trace.hit_epsilon_factor must be > 0");
  if (max_steps < 1) throw ConfigError("sphere_trace.max_steps must be >= 1");
  if (!(min_step_factor > 0)) throw ConfigError("sphere_trace.min_step_factor must be > 0");
}

std::optional<HitResult> sphere_trace(const CascadedDistanceField& field, const RayQuery& query,
    const SphereTraceParams& params, WorkStats& stats, bool include_end) {
  auto b      = query.t_max;
  auto inside = [&](double t) { return include_end ? t <= b : t < b; };
  auto t      = query.t_min;
  if (!(query.t_min <= query.t_max) || !inside(t)) return std::nullopt;

  for (int step = 0; step < params.max_steps; step++) {
    stats.sphere_trace_steps++;
    auto p      = query.at(t);
    auto sample = field.sample(p);
    if (sample.distance < params.hit_epsilon_factor * sample.voxel_size) {
      auto hit   = HitResult{};
      hit.t      = t;
      hit.point  = p;
      hit.normal = field.gradient(p);
      if (dot(hit.normal, query.direction) > 0) hit.normal = -hit.normal;
      hit.source = TracerKind::Field;
      return hit;
    }
    t += std::max(sample.distance, params.min_step_factor * sample.voxel_size);
    if (!inside(t)) return std::nullopt;
  }
  stats.sphere_trace_exhausted++;
  return std::nullopt;
}

}  // namespace splitrt
