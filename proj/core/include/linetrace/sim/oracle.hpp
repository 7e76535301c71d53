// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "linetrace/sim/world.hpp"

namespace linetrace::sim {

/// Normalized velocity pair, each component nominally in [-1, 1].
struct DriveCommand {
  double linear = 0.0;
  double angular = 0.0;
  bool operator==(const DriveCommand&) const = default;
};

/// Pure-pursuit stand-in for the human operator. Returns nullopt (the
/// off-track signal) when the robot is farther than capture_distance from
/// the centerline. The result has unit norm.
std::optional<DriveCommand> oracle_drive(const TrackWorld& world, const Pose& pose, const OracleParams& params);

}  // namespace linetrace::sim
