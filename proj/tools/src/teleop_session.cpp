// SPDX-License-Identifier: Apache-2.0
#include "linetrace/cli/teleop.hpp"

#include <cmath>

#include <boost/beast/core/detail/base64.hpp>
#include <nlohmann/json.hpp>

#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/imaging/png_io.hpp"

namespace linetrace::cli {

using nlohmann::json;

namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

}  // namespace

TeleopSession::TeleopSession(sim::TrackWorld world, sim::SimConfig config,
                             std::optional<threshold::HsvThreshold> threshold)
    : world_(std::move(world)), config_(std::move(config)), threshold_(std::move(threshold)) {
  demos_.provenance = dataset::Provenance::Teleop;
  restart();
}

void TeleopSession::restart() {
  runner_ = std::make_unique<sim::EpisodeRunner>(world_, config_, sim::start_pose(world_));
}

bool TeleopSession::connect() {
  if (connected_) return false;
  connected_ = true;
  session_id_ = "session-" + std::to_string(++sessions_);
  command_ = {};
  recording_ = false;
  demos_ = dataset::DemoSet{};
  demos_.provenance = dataset::Provenance::Teleop;
  return true;
}

dataset::DemoSet TeleopSession::disconnect() {
  connected_ = false;
  recording_ = false;
  command_ = {};
  dataset::DemoSet out = std::move(demos_);
  demos_ = dataset::DemoSet{};
  demos_.provenance = dataset::Provenance::Teleop;
  return out;
}

std::string TeleopSession::hello() const {
  return json{{"type", "hello"}, {"world", world_.name}, {"fps", config_.camera.fps}}.dump();
}

std::string TeleopSession::error_message(const std::string& msg) { return json{{"type", "error"}, {"msg", msg}}.dump(); }

std::optional<std::string> TeleopSession::handle(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return error_message("malformed JSON");
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    return error_message("message needs a string 'type'");
  const std::string type = msg["type"].get<std::string>();
  if (type == "cmd") {
    if (!msg.contains("linear") || !msg["linear"].is_number() || !msg.contains("angular") ||
        !msg["angular"].is_number())
      return error_message("cmd needs numeric 'linear' and 'angular'");
    const double l = msg["linear"].get<double>(), a = msg["angular"].get<double>();
    if (!std::isfinite(l) || !std::isfinite(a)) return error_message("cmd values must be finite");
    command_ = {l, a};  // latest wins
    return std::nullopt;
  }
  if (type == "record") {
    if (!msg.contains("on") || !msg["on"].is_boolean()) return error_message("record needs boolean 'on'");
    const bool on = msg["on"].get<bool>();
    if (on && !connected_) return error_message("recording requires a connected client");
    if (on && !threshold_) return error_message("no threshold for color '" + world_.color + "'; recording disabled");
    recording_ = on;
    return std::nullopt;
  }
  return error_message("unknown message type '" + type + "'");
}

TeleopSession::Tick TeleopSession::tick(bool encode) {
  if (runner_->finished()) restart();
  driver_.set(command_);
  auto st = runner_->step(driver_, true);
  if (!st) {
    restart();
    st = runner_->step(driver_, true);
  }
  Tick out;
  out.seq = seq_++;
  out.record = st->record;
  if (recording_ && !st->frame.empty() && threshold_) {
    dataset::DemoRecord rec;
    rec.input = imaging::preprocess(st->frame, *threshold_, config_.blur);
    const auto [l, a] = dataset::normalize_velocity(st->decision.command.linear, st->decision.command.angular);
    rec.linear = l;
    rec.angular = a;
    demos_.records.push_back(rec);
    out.recorded = true;
  }
  if (encode) {
    const sim::Pose& p = st->record.pose;
    json frame = {{"type", "frame"},
                  {"seq", out.seq},
                  {"t", static_cast<double>(out.seq) * config_.camera.frame_period()},
                  {"png_b64", st->frame.empty() ? std::string() : base64(imaging::encode_png(st->frame, true))},
                  {"pose", {p.x, p.y, p.theta}},
                  {"recording", recording_}};
    out.message = frame.dump();
  }
  return out;
}

}  // namespace linetrace::cli
