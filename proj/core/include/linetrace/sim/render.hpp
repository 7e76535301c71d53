// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "linetrace/imaging/image.hpp"
#include "linetrace/sim/camera.hpp"
#include "linetrace/sim/world.hpp"

namespace linetrace::sim {

/// Renders the floor as seen by the camera. Holds the per-pixel ground rays,
/// so reuse one instance across frames.
class Renderer {
 public:
  explicit Renderer(const CameraModel& camera);

  const CameraRig& rig() const { return rig_; }

  /// Frame at the world's lighting. Bit-identical for identical inputs.
  imaging::RgbImage render(const TrackWorld& world, const Pose& pose) const;
  /// Same frame plus the ground-truth line mask (line pixels not hidden by
  /// an occluder).
  imaging::RgbImage render(const TrackWorld& world, const Pose& pose, imaging::BinaryMask& truth) const;

 private:
  imaging::RgbImage render_impl(const TrackWorld& world, const Pose& pose, imaging::BinaryMask* truth) const;

  CameraRig rig_;
};

imaging::RgbImage render_camera(const TrackWorld& world, const Pose& pose, const CameraModel& camera);

/// round(lambda * c) per channel.
imaging::RgbImage apply_lighting(const imaging::RgbImage& img, double lambda);

}  // namespace linetrace::sim
