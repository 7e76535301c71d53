// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace linetrace::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  /// Robot frame (forward, left) to world frame.
  Vec2 to_world(Vec2 local) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
  }
  /// World frame to robot frame (forward, left).
  Vec2 to_local(Vec2 world) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const Vec2 d = world - position();
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
  }
  bool operator==(const Pose&) const = default;
};

/// Differential-drive state. Positive omega turns counter-clockwise.
struct RobotState {
  Pose pose;
  double v = 0.0;
  double omega = 0.0;
};

/// Wraps to (-pi, pi].
double wrap_angle(double a);

/// Exact arc integration of the unicycle model over dt (closed form, not
/// Euler), so one step of dt equals two steps of dt / 2. Throws
/// std::invalid_argument for dt <= 0 or non-finite inputs.
RobotState step_kinematics(const RobotState& state, double v, double omega, double dt);

}  // namespace linetrace::sim
