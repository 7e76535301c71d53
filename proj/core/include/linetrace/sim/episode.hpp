// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "linetrace/imaging/image.hpp"
#include "linetrace/nn/network.hpp"
#include "linetrace/sim/oracle.hpp"
#include "linetrace/sim/render.hpp"
#include "linetrace/threshold/threshold.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::sim {

/// One row of an episode log. Commands and predictions are normalized;
/// multiply by (v_max, omega_max) for physical units.
struct FrameRecord {
  std::size_t frame = 0;
  double t = 0.0;
  Pose pose;
  DriveCommand command;
  std::optional<DriveCommand> prediction;
  double xtrack_err = 0.0;
  bool on_track = true;

  /// The prediction when a model ran, else the command.
  DriveCommand decision() const { return prediction.value_or(command); }
};

struct EpisodeTrace {
  std::string world;
  std::vector<FrameRecord> frames;
  bool completed = false;  ///< one lap (closed) or reached the end (open)
  bool off_track = false;
  double progress = 0.0;   ///< arc length covered, metres

  double mean_xtrack() const;
  double max_xtrack() const;
};

std::string trace_to_csv(const EpisodeTrace& trace);
void write_trace_csv(const EpisodeTrace& trace, const std::filesystem::path& path);
/// off_track is restored from the last row; completion and progress are not stored.
EpisodeTrace parse_trace_csv(const std::string& text, const std::string& source = "<trace>");
EpisodeTrace read_trace_csv(const std::filesystem::path& path);

struct FrameContext {
  const TrackWorld& world;
  const Pose& pose;
  const imaging::RgbImage* frame;  ///< null when the driver does not need pixels
  std::size_t index;
  double t;
};

struct Decision {
  DriveCommand command;                   ///< what the robot executes
  std::optional<DriveCommand> prediction; ///< raw model output
  std::optional<DriveCommand> label;      ///< clean demonstration label
};

class Driver {
 public:
  virtual ~Driver() = default;
  virtual Decision decide(const FrameContext& ctx) = 0;
  virtual bool needs_frame() const { return false; }
};

/// Pure pursuit. With exec_noise > 0, an AR(1) disturbance is added to the
/// executed angular command while the label stays the clean oracle output,
/// so the recorded demos include recoveries from off-centre poses.
class OracleDriver : public Driver {
 public:
  explicit OracleDriver(OracleParams params, double exec_noise = 0.0, std::uint64_t seed = 0);
  Decision decide(const FrameContext& ctx) override;

 private:
  OracleParams params_;
  double noise_sigma_;
  double noise_ = 0.0;
  Rng rng_;
};

/// Frame -> preprocess -> network -> clamp to [-1, 1].
class ModelDriver : public Driver {
 public:
  /// Throws ConfigError unless the network maps 1024 inputs to 2 outputs.
  ModelDriver(nn::Network& net, threshold::HsvThreshold threshold, imaging::BlurConfig blur = {});
  Decision decide(const FrameContext& ctx) override;
  bool needs_frame() const override { return true; }

 private:
  nn::Network& net_;
  threshold::HsvThreshold threshold_;
  imaging::BlurConfig blur_;
};

/// Executes a fixed command (raw values clamped to [-1, 1]); set() changes it.
class CommandDriver : public Driver {
 public:
  explicit CommandDriver(DriveCommand cmd = {}) : cmd_(cmd) {}
  void set(DriveCommand cmd) { cmd_ = cmd; }
  Decision decide(const FrameContext& ctx) override;

 private:
  DriveCommand cmd_;
};

/// Pose at arc length s, shifted left by `lateral` and rotated by `heading`.
Pose start_pose(const TrackWorld& world, double s = 0.0, double lateral = 0.0, double heading = 0.0);

/// Frame-by-frame simulation loop; run_episode drives it to the end, the
/// teleop service ticks it in real time.
class EpisodeRunner {
 public:
  EpisodeRunner(TrackWorld world, const SimConfig& config, Pose start, bool stop_on_completion = false);

  struct Step {
    FrameRecord record;
    Decision decision;
    imaging::RgbImage frame;  ///< empty unless rendered
  };

  /// Renders (when needed), asks the driver, logs and advances the pose.
  /// Returns nullopt once the episode has ended.
  std::optional<Step> step(Driver& driver, bool want_frame = false);

  bool finished() const { return finished_; }
  const EpisodeTrace& trace() const { return trace_; }
  EpisodeTrace take_trace() { return std::move(trace_); }
  const RobotState& state() const { return state_; }
  const Renderer& renderer() const { return renderer_; }

 private:
  TrackWorld world_;
  SimConfig config_;
  bool stop_on_completion_;
  Renderer renderer_;
  RobotState state_;
  EpisodeTrace trace_;
  double last_s_ = 0.0;
  bool finished_ = false;
};

struct EpisodeOptions {
  std::size_t frames = 600;
  std::optional<Pose> start;  ///< default: start of the track
  bool stop_on_completion = false;  ///< stop after one lap / at the end of an open track
  std::function<void(const EpisodeRunner::Step&)> on_frame;
  bool render_every_frame = false;  ///< pass rendered frames to on_frame even if the driver ignores them
};

/// Closed-loop run. Ends early when the robot leaves the capture radius, or
/// at the end of an open track.
EpisodeTrace run_episode(const TrackWorld& world, Driver& driver, const SimConfig& config,
                         const EpisodeOptions& options = {});

/// Re-drives `driver` over the reference poses without moving the robot.
EpisodeTrace replay_open_loop(const TrackWorld& world, const EpisodeTrace& reference, Driver& driver,
                              const SimConfig& config);

struct TraceComparison {
  std::size_t frames = 0;
  double mae_linear = 0.0;
  double mae_angular = 0.0;
};

/// MAE between the two traces' decisions. Throws ShapeError on a frame
/// count mismatch or empty traces.
TraceComparison compare_traces(const EpisodeTrace& model, const EpisodeTrace& reference);

}  // namespace linetrace::sim
