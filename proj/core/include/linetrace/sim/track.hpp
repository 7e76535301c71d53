// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "linetrace/sim/kinematics.hpp"

namespace linetrace::sim {

struct TrackSample {
  Vec2 pos;
  double s = 0.0;          ///< arc length from the first waypoint
  double heading = 0.0;    ///< tangent direction
  double curvature = 0.0;  ///< signed, positive turning left
};

struct NearestPoint {
  double distance = 0.0;
  double s = 0.0;
  Vec2 point;
  double heading = 0.0;
};

/// Centerline through waypoints as a centripetal Catmull-Rom spline,
/// resampled at uniform arc length. Nearest-point queries go through a
/// uniform grid of segment indices.
class Track {
 public:
  Track(std::vector<Vec2> waypoints, bool closed, double spacing = 0.005);

  bool closed() const { return closed_; }
  double length() const { return length_; }
  double spacing() const { return spacing_; }
  const std::vector<TrackSample>& samples() const { return samples_; }
  const std::vector<Vec2>& waypoints() const { return waypoints_; }

  /// Sample at arc length s; wraps on closed tracks, clamps on open ones.
  TrackSample at(double s) const;
  /// Curvature averaged over +-window around s.
  double curvature_at(double s) const;
  /// Signed arc-length difference b - a, wrapped to (-L/2, L/2] on closed tracks.
  double delta_s(double a, double b) const;

  /// Nearest centerline point within max_distance, if any.
  std::optional<NearestPoint> nearest(Vec2 p, double max_distance) const;
  /// True when some centerline point lies within r of p.
  bool within(Vec2 p, double r) const;

  Vec2 min_corner() const { return lo_; }
  Vec2 max_corner() const { return hi_; }

 private:
  void build_grid();
  template <class F>
  void for_segments_near(Vec2 p, double r, F&& f) const;

  std::vector<Vec2> waypoints_;
  bool closed_;
  double spacing_;
  double length_ = 0.0;
  std::vector<TrackSample> samples_;

  // segment i joins samples_[i] and samples_[i + 1] (wrapping when closed)
  std::size_t segment_count_ = 0;
  Vec2 lo_, hi_;
  double cell_ = 0.05;
  int gx_ = 0, gy_ = 0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_items_;
};

}  // namespace linetrace::sim
