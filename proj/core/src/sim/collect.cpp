// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/collect.hpp"

#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::sim {

CameraModel jitter_camera(const CameraModel& base, std::uint64_t seed, int round) {
  Rng rng(mix64(seed ^ (0xca3e7aULL + static_cast<std::uint64_t>(round))));
  const double near = base.mount_forward + base.mount_height / std::tan(base.pitch + 0.5 * base.vfov);
  const double far = base.mount_forward + base.mount_height / std::tan(base.pitch - 0.5 * base.vfov);
  CameraModel m = CameraModel::from_footprint(near * rng.uniform(0.9, 1.1), far * rng.uniform(0.9, 1.1),
                                              base.mount_height, base.width, base.height, base.fps);
  m.mount_forward = base.mount_forward;
  return m;
}

Collection collect_demos(const TrackWorld& world, const SimConfig& config, const threshold::HsvThreshold& threshold,
                         const CollectOptions& options) {
  Collection out;
  out.demos.provenance = dataset::Provenance::Oracle;
  Rng rng(options.seed);
  const Track& track = world.track();
  for (int r = 0; r < options.rounds; ++r) {
    SimConfig cfg = config;
    if (options.vary && r > 0) cfg.camera = jitter_camera(config.camera, options.seed, r);
    const double s0 = track.closed() ? rng.uniform(0.0, track.length()) : 0.0;
    const Pose start = start_pose(world, s0, rng.uniform(-options.start_lateral, options.start_lateral));
    OracleDriver driver(cfg.oracle, options.exec_noise, rng.next());
    EpisodeRunner runner(world, cfg, start);
    RoundReport report;
    report.camera = cfg.camera;
    for (std::size_t i = 0; i < options.frames; ++i) {
      auto st = runner.step(driver, true);
      if (!st) break;
      if (st->decision.label) {
        dataset::DemoRecord rec;
        rec.input = imaging::preprocess(st->frame, threshold, cfg.blur);
        rec.linear = st->decision.label->linear;
        rec.angular = st->decision.label->angular;
        out.demos.records.push_back(rec);
        ++report.records;
      }
      if (runner.finished()) break;
    }
    report.off_track = runner.trace().off_track;
    out.rounds.push_back(report);
  }
  return out;
}

}  // namespace linetrace::sim
