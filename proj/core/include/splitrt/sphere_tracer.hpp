#pragma once

#include <optional>

#include "splitrt/distance_field.hpp"
#include "splitrt/ray.hpp"

namespace splitrt {

// Marcher constants; thresholds scale with the voxel size of the cascade
// sampled at the current point.
struct SphereTraceParams {
  double hit_epsilon_factor = 0.5;
  int    max_steps          = 256;
  double min_step_factor    = 0.1;

  // Throws ConfigError.
  void validate() const;
};

// Marches from query.t_min while t <= query.t_max (t < t_max when
// `include_end` is false, for a segment whose end is shared with the next
// one). Hits carry source = Field and a gradient normal facing the origin.
std::optional<HitResult> sphere_trace(const CascadedDistanceField& field, const RayQuery& query,
    const SphereTraceParams& params, WorkStats& stats, bool include_end = true);

}  // namespace splitrt
