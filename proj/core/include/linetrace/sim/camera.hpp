// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "linetrace/sim/kinematics.hpp"

namespace linetrace::sim {

/// Forward-facing pinhole camera pitched toward the floor.
struct CameraModel {
  int width = 640;
  int height = 480;
  double fps = 6.0;
  double mount_height = 0.5;   ///< metres above the floor
  double mount_forward = 0.0;  ///< offset ahead of the axle centre
  double pitch = 0.0;          ///< radians below horizontal
  double vfov = 0.0;           ///< radians
  double hfov = 0.0;           ///< radians

  /// Pitch and field of view such that the image spans [near, far] ahead of
  /// the camera; square pixels set hfov.
  static CameraModel from_footprint(double near, double far, double mount_height = 0.5, int width = 640,
                                    int height = 480, double fps = 6.0);
  /// The default rig: 0.3 m to 1.0 m ahead, camera 0.5 m up.
  static CameraModel standard();

  double frame_period() const { return 1.0 / fps; }
  /// Throws ConfigError when the upper image edge does not meet the floor.
  void validate() const;
};

/// Per-pixel floor intersections, precomputed.
class CameraRig {
 public:
  explicit CameraRig(const CameraModel& model);

  const CameraModel& model() const { return model_; }
  /// Floor point seen by pixel centre (x, y), robot frame (forward, left).
  Vec2 ground_offset(int x, int y) const {
    return offsets_[static_cast<std::size_t>(y) * static_cast<std::size_t>(model_.width) + static_cast<std::size_t>(x)];
  }
  const std::vector<Vec2>& offsets() const { return offsets_; }
  /// Continuous pixel coordinates of a floor point, or nullopt when it lies
  /// behind the camera or outside the image.
  std::optional<Vec2> project(Vec2 local) const;
  /// Robot-frame bounding radius of everything the camera sees.
  double reach() const { return reach_; }

 private:
  CameraModel model_;
  std::vector<Vec2> offsets_;
  double reach_ = 0.0;
};

}  // namespace linetrace::sim
