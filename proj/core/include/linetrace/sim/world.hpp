// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/sim/camera.hpp"
#include "linetrace/sim/track.hpp"

namespace linetrace::sim {

using Rgb = std::array<std::uint8_t, 3>;

/// Floor-level rectangle painted over the track (a box seen from above).
struct Occluder {
  Vec2 center;
  Vec2 size;           ///< extent along the rotated x and y axes
  double angle = 0.0;  ///< rotation, radians
  Rgb rgb{90, 90, 90};

  bool contains(Vec2 p) const;
};

/// Named colors accepted in world files. Throws ConfigError for unknown names.
Rgb color_by_name(const std::string& name);

class TrackWorld {
 public:
  TrackWorld(std::string name, std::vector<Vec2> waypoints, bool closed);

  std::string name;
  double line_width = 0.05;
  std::string color = "yellow";  ///< also selects <color>.threshold.json
  Rgb line_rgb{235, 200, 40};
  Rgb background_rgb{118, 108, 96};
  std::uint64_t seed = 1;
  double lighting = 1.0;
  std::vector<Occluder> occluders;

  const Track& track() const { return *track_; }
  bool closed() const { return track_->closed(); }

  /// Copies share the spline; only the scene parameters change.
  TrackWorld with_lighting(double lambda) const;
  TrackWorld with_occluders(std::vector<Occluder> occ) const;
  TrackWorld with_color(const std::string& color_name) const;

  /// Throws ConfigError when width <= 0, lighting outside (0, 1] or an
  /// occluder has a non-positive size.
  void validate() const;

 private:
  std::shared_ptr<const Track> track_;
};

TrackWorld world_from_json(const std::string& text, const std::string& source = "<world>");
std::string world_to_json(const TrackWorld& world);
TrackWorld load_world(const std::filesystem::path& path);
void save_world(const TrackWorld& world, const std::filesystem::path& path);

/// Waypoints every `step` metres along a piecewise-constant curvature path.
std::vector<Vec2> waypoints_from_curvature(Pose start, const std::vector<std::pair<double, double>>& pieces,
                                           double step = 0.25);

namespace presets {
/// Stadium loop, 2 m straights joined by 1.5 m radius turns.
TrackWorld oval();
/// Open S: straight, left arc, straight, right arc, straight.
TrackWorld s_curve();
/// Three-lobed closed loop in pink, not used for training.
TrackWorld test_loop();
}  // namespace presets

struct OracleParams {
  double lookahead = 0.35;   ///< arc distance ahead of the nearest point, metres
  double k_alpha = 2.0;      ///< heading-error gain
  double k_curvature = 0.75; ///< speed reduction per unit curvature
  double v_floor_frac = 0.3;
  double v_max = 0.5;
  double capture_distance = 0.2;
};

struct SimConfig {
  CameraModel camera = CameraModel::standard();
  double v_max = 0.5;       ///< m/s, denormalization scale for linear
  double omega_max = 1.5;   ///< rad/s, denormalization scale for angular
  double capture_radius = 0.2;
  OracleParams oracle;
  imaging::BlurConfig blur;

  void validate() const;
};

SimConfig sim_config_from_json(const std::string& text, const std::string& source = "<config>");
std::string sim_config_to_json(const SimConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);

}  // namespace linetrace::sim
