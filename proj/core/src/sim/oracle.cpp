// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "linetrace/dataset/demo.hpp"

namespace linetrace::sim {

std::optional<DriveCommand> oracle_drive(const TrackWorld& world, const Pose& pose, const OracleParams& params) {
  const Track& track = world.track();
  const auto near = track.nearest(pose.position(), params.capture_distance);
  if (!near) return std::nullopt;
  const double s_look = near->s + params.lookahead;
  const TrackSample look = track.at(s_look);
  const Vec2 d = look.pos - pose.position();
  const double alpha = wrap_angle(std::atan2(d.y, d.x) - pose.theta);
  const double omega_raw = params.k_alpha * alpha;
  const double v_raw =
      params.v_max * std::clamp(1.0 - params.k_curvature * std::abs(look.curvature), params.v_floor_frac, 1.0);
  const auto [v, w] = dataset::normalize_velocity(v_raw, omega_raw);
  return DriveCommand{v, w};
}

}  // namespace linetrace::sim
