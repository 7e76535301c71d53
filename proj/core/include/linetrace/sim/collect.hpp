// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linetrace/dataset/demo.hpp"
#include "linetrace/sim/episode.hpp"

namespace linetrace::sim {

struct CollectOptions {
  int rounds = 1;
  std::size_t frames = 600;   ///< per round
  double exec_noise = 0.25;   ///< stddev of the angular disturbance, normalized units
  double start_lateral = 0.04;
  bool vary = false;          ///< jitter the camera footprint between rounds
  std::uint64_t seed = 0;
};

struct RoundReport {
  std::size_t records = 0;
  bool off_track = false;
  CameraModel camera;
};

struct Collection {
  dataset::DemoSet demos;
  std::vector<RoundReport> rounds;
};

/// Camera for round `round` under --vary: near/far edges moved by up to
/// +-10%, derived from the seed.
CameraModel jitter_camera(const CameraModel& base, std::uint64_t seed, int round);

/// Oracle-driven rounds. Every frame is preprocessed with `threshold` and
/// labeled with the clean oracle command. A round that leaves the track
/// keeps the frames recorded so far and is flagged in its report.
Collection collect_demos(const TrackWorld& world, const SimConfig& config, const threshold::HsvThreshold& threshold,
                         const CollectOptions& options);

}  // namespace linetrace::sim
