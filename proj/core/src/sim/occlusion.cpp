// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/occlusion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace linetrace::sim {

double visible_centerline(const TrackWorld& world, const CameraRig& rig, const Pose& pose) {
  const Track& track = world.track();
  const double reach = rig.reach() + 0.05;
  double visible = 0.0;
  for (const auto& s : track.samples()) {
    if ((s.pos - pose.position()).norm() > reach) continue;
    if (!rig.project(pose.to_local(s.pos))) continue;
    bool hidden = false;
    for (const auto& o : world.occluders)
      if (o.contains(s.pos)) {
        hidden = true;
        break;
      }
    if (!hidden) visible += track.spacing();
  }
  return visible;
}

VisibilityReport sweep_visibility(const TrackWorld& world, const CameraModel& camera, const SweepOptions& options) {
  const CameraRig rig(camera);
  const Track& track = world.track();
  VisibilityReport r;
  r.min_visible = std::numeric_limits<double>::infinity();
  // Open tracks stop where the remaining track would leave the view anyway.
  const double end = track.closed() ? track.length() : std::max(0.0, track.length() - 1.0);
  for (double s = 0.0; s < end || r.poses == 0; s += options.step) {
    const TrackSample ts = track.at(s);
    const Pose pose{ts.pos.x, ts.pos.y, ts.heading};
    const double v = visible_centerline(world, rig, pose);
    ++r.poses;
    if (v < r.min_visible) {
      r.min_visible = v;
      r.worst_s = s;
      r.worst_pose = pose;
    }
    if (v < options.min_visible) {
      r.ok = false;
      r.failing_s.push_back(s);
    }
  }
  return r;
}

TrackWorld occlusion_scenario(const TrackWorld& world, std::vector<Occluder> plan, const CameraModel& camera,
                              const SweepOptions& options) {
  TrackWorld out = world.with_occluders([&] {
    std::vector<Occluder> all = world.occluders;
    all.insert(all.end(), plan.begin(), plan.end());
    return all;
  }());
  if (plan.empty()) return out;
  VisibilityReport r = sweep_visibility(out, camera, options);
  if (!r.ok) {
    std::ostringstream msg;
    msg << "occlusion plan hides the track: " << r.failing_s.size() << " of " << r.poses
        << " swept poses see less than " << options.min_visible << " m of centerline; worst at s=" << r.worst_s
        << " pose=(" << r.worst_pose.x << ", " << r.worst_pose.y << ", " << r.worst_pose.theta
        << ") visible=" << r.min_visible << " m";
    throw OcclusionRejected(msg.str(), std::move(r));
  }
  return out;
}

std::vector<Occluder> cover_sections(const TrackWorld& world, const std::vector<std::pair<double, double>>& intervals,
                                     double across, double piece, Rgb rgb) {
  const Track& track = world.track();
  std::vector<Occluder> out;
  for (auto [s0, s1] : intervals) {
    if (!(s1 > s0)) throw ConfigError("cover_sections: empty interval");
    const int n = static_cast<int>(std::ceil((s1 - s0) / piece - 1e-9));
    const double len = (s1 - s0) / n;
    for (int i = 0; i < n; ++i) {
      const double a = s0 + i * len, b = a + len;
      const Vec2 pa = track.at(a).pos, pb = track.at(b).pos;
      const Vec2 d = pb - pa;
      Occluder o;
      o.center = (pa + pb) * 0.5;
      // Small overlap so neighbouring pieces leave no seam on curves.
      o.size = {d.norm() + 0.02, across};
      o.angle = std::atan2(d.y, d.x);
      o.rgb = rgb;
      out.push_back(o);
    }
  }
  return out;
}

std::vector<Occluder> block_curves(const TrackWorld& world, double blocked, double open, double min_curvature) {
  if (!(blocked > 0.0) || !(open > 0.0)) throw ConfigError("block_curves: lengths must be > 0");
  const Track& track = world.track();
  std::vector<std::pair<double, double>> intervals;
  double s = 0.0;
  const double end = track.length();
  while (s + blocked <= end) {
    const bool curved = std::abs(track.at(s).curvature) >= min_curvature &&
                        std::abs(track.at(s + blocked).curvature) >= min_curvature;
    if (curved) {
      intervals.push_back({s, s + blocked});
      s += blocked + open;
    } else {
      s += 0.05;
    }
  }
  if (intervals.empty()) return {};
  return cover_sections(world, intervals);
}

}  // namespace linetrace::sim
