// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/kinematics.hpp"

#include <numbers>
#include <stdexcept>

namespace linetrace::sim {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

RobotState step_kinematics(const RobotState& state, double v, double omega, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");
  if (!std::isfinite(v) || !std::isfinite(omega)) throw std::invalid_argument("step_kinematics: non-finite command");
  const double half = 0.5 * omega * dt;
  // Chord length of the arc: v dt sinc(omega dt / 2), well conditioned for omega -> 0.
  const double sinc = std::abs(half) < 1e-6 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  const double chord = v * dt * sinc;
  const double dir = state.pose.theta + half;
  RobotState next;
  next.pose.x = state.pose.x + chord * std::cos(dir);
  next.pose.y = state.pose.y + chord * std::sin(dir);
  next.pose.theta = wrap_angle(state.pose.theta + omega * dt);
  next.v = v;
  next.omega = omega;
  return next;
}

}  // namespace linetrace::sim
