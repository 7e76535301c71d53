// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "linetrace/error.hpp"
#include "linetrace/sim/world.hpp"

namespace linetrace::sim {

struct SweepOptions {
  double step = 0.05;         ///< arc spacing of the swept poses, metres
  double min_visible = 0.10;  ///< required visible centerline length per frame, metres
};

struct VisibilityReport {
  bool ok = true;
  std::size_t poses = 0;
  double min_visible = 0.0;  ///< smallest visible length over the sweep
  double worst_s = 0.0;
  Pose worst_pose;
  std::vector<double> failing_s;
};

/// Visible, unoccluded centerline length inside the camera image at `pose`.
double visible_centerline(const TrackWorld& world, const CameraRig& rig, const Pose& pose);

/// Places the robot on the centerline, heading along the tangent, every
/// `step` metres and measures visible_centerline at each pose.
VisibilityReport sweep_visibility(const TrackWorld& world, const CameraModel& camera, const SweepOptions& options = {});

class OcclusionRejected : public ConfigError {
 public:
  OcclusionRejected(const std::string& what, VisibilityReport report)
      : ConfigError(what), report_(std::move(report)) {}
  const VisibilityReport& report() const noexcept { return report_; }

 private:
  VisibilityReport report_;
};

/// World with `plan` added, after a visibility sweep. Throws
/// OcclusionRejected naming the first failing pose.
TrackWorld occlusion_scenario(const TrackWorld& world, std::vector<Occluder> plan, const CameraModel& camera,
                              const SweepOptions& options = {});

/// Rectangles aligned with the track covering the arc intervals [s0, s1].
/// Long or curved intervals are split into pieces of at most `piece` metres.
std::vector<Occluder> cover_sections(const TrackWorld& world, const std::vector<std::pair<double, double>>& intervals,
                                     double across = 0.3, double piece = 0.25, Rgb rgb = {90, 90, 90});

/// Alternating blocked / open stretches over every part of the track whose
/// curvature exceeds `min_curvature`.
std::vector<Occluder> block_curves(const TrackWorld& world, double blocked, double open, double min_curvature = 0.2);

}  // namespace linetrace::sim
