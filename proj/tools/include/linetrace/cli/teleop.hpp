// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "linetrace/dataset/demo.hpp"
#include "linetrace/sim/episode.hpp"
#include "linetrace/threshold/threshold.hpp"

namespace linetrace::cli {

/// Protocol state of one teleoperation service, independent of the
/// transport. The service owns one of these and feeds it client messages
/// and frame ticks.
///
///   server -> client  {"type":"hello","world":name,"fps":6}
///                     {"type":"frame","seq":n,"t":secs,"png_b64":...,"pose":[x,y,theta],"recording":bool}
///                     {"type":"error","msg":...}
///   client -> server  {"type":"cmd","linear":f,"angular":f}
///                     {"type":"record","on":bool}
class TeleopSession {
 public:
  /// Without a threshold, recording requests are answered with an error.
  TeleopSession(sim::TrackWorld world, sim::SimConfig config, std::optional<threshold::HsvThreshold> threshold);

  /// Starts a new session for a client. Returns false if one is active.
  bool connect();
  /// Ends the active session; recording stops. Returns the demos recorded
  /// during it.
  dataset::DemoSet disconnect();
  bool connected() const { return connected_; }
  int client_count() const { return connected_ ? 1 : 0; }
  const std::string& session_id() const { return session_id_; }

  std::string hello() const;
  static std::string error_message(const std::string& msg);

  /// Applies one client message. Returns an error reply for malformed or
  /// refused messages; the session continues either way.
  std::optional<std::string> handle(const std::string& text);

  struct Tick {
    std::uint64_t seq = 0;
    sim::FrameRecord record;
    bool recorded = false;  ///< a demo was appended for this frame
    std::string message;    ///< empty when render_png is false
  };

  /// One frame: render at the current pose, apply the latest command,
  /// record a demo when recording, advance. An episode that leaves the
  /// track restarts at the start pose.
  Tick tick(bool encode = true);

  bool recording() const { return recording_; }
  sim::DriveCommand latest_command() const { return command_; }
  const dataset::DemoSet& demos() const { return demos_; }
  const sim::EpisodeTrace& trace() const { return runner_->trace(); }
  const sim::TrackWorld& world() const { return world_; }
  const sim::SimConfig& config() const { return config_; }

 private:
  void restart();

  sim::TrackWorld world_;
  sim::SimConfig config_;
  std::optional<threshold::HsvThreshold> threshold_;
  std::unique_ptr<sim::EpisodeRunner> runner_;
  sim::CommandDriver driver_;
  sim::DriveCommand command_;
  bool recording_ = false;
  bool connected_ = false;
  std::uint64_t seq_ = 0;
  std::uint64_t sessions_ = 0;
  std::string session_id_;
  dataset::DemoSet demos_;
};

struct ServeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  ///< 0 picks a free port
  std::filesystem::path out_dir = ".";
  std::filesystem::path static_dir;  ///< UI assets served at /, optional
  double duration = 0.0;             ///< seconds before shutting down, 0 = until signalled
  std::function<void(std::uint16_t)> on_listening;
};

/// HTTP + WebSocket service on one port. WebSocket clients connect to
/// /teleop; a second concurrent client is sent a busy error and closed.
/// Each finished session with recorded frames is written to
/// <out_dir>/teleop_<session>.csv. Returns when the duration elapses or on
/// SIGINT/SIGTERM.
void serve_teleop(TeleopSession& session, const ServeOptions& options, std::ostream& log);

}  // namespace linetrace::cli
