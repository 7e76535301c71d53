// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/episode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "linetrace/error.hpp"
#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/models/training.hpp"

namespace linetrace::sim {

namespace {

constexpr double kOpenEndMargin = 0.05;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

double distance_to_track(const Track& track, Vec2 p, double hint_radius) {
  if (const auto n = track.nearest(p, hint_radius)) return n->distance;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : track.samples()) best = std::min(best, (s.pos - p).norm());
  return best;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

}  // namespace

double EpisodeTrace::mean_xtrack() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : frames) sum += f.xtrack_err;
  return sum / static_cast<double>(frames.size());
}

double EpisodeTrace::max_xtrack() const {
  double m = 0.0;
  for (const auto& f : frames) m = std::max(m, f.xtrack_err);
  return m;
}

std::string trace_to_csv(const EpisodeTrace& trace) {
  std::string out = "frame,t,x,y,theta,v_cmd,w_cmd,v_pred,w_pred,xtrack_err,on_track\n";
  for (const auto& f : trace.frames) {
    out += std::to_string(f.frame);
    for (double v : {f.t, f.pose.x, f.pose.y, f.pose.theta, f.command.linear, f.command.angular}) {
      out += ',';
      append_number(out, v);
    }
    out += ',';
    if (f.prediction) append_number(out, f.prediction->linear);
    out += ',';
    if (f.prediction) append_number(out, f.prediction->angular);
    out += ',';
    append_number(out, f.xtrack_err);
    out += f.on_track ? ",1\n" : ",0\n";
  }
  return out;
}

void write_trace_csv(const EpisodeTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << trace_to_csv(trace);
}

EpisodeTrace parse_trace_csv(const std::string& text, const std::string& source) {
  static const char* kHeader = "frame,t,x,y,theta,v_cmd,w_cmd,v_pred,w_pred,xtrack_err,on_track";
  static const char* kFields[] = {"frame", "t",      "x",      "y",          "theta",   "v_cmd",
                                  "w_cmd", "v_pred", "w_pred", "xtrack_err", "on_track"};
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ParseError(source, 1, "", "expected trace header");
  EpisodeTrace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 11) throw ParseError(source, lineno, "", "expected 11 columns");
    auto num = [&](std::size_t i) {
      double v = 0.0;
      const auto& c = cells[i];
      const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
      if (r.ec != std::errc() || r.ptr != c.data() + c.size()) throw ParseError(source, lineno, kFields[i], "not a number");
      return v;
    };
    FrameRecord f;
    f.frame = static_cast<std::size_t>(num(0));
    f.t = num(1);
    f.pose = {num(2), num(3), num(4)};
    f.command = {num(5), num(6)};
    if (cells[7].empty() != cells[8].empty()) throw ParseError(source, lineno, "v_pred", "prediction half missing");
    if (!cells[7].empty()) f.prediction = DriveCommand{num(7), num(8)};
    f.xtrack_err = num(9);
    if (cells[10] != "0" && cells[10] != "1") throw ParseError(source, lineno, "on_track", "expected 0 or 1");
    f.on_track = cells[10] == "1";
    trace.frames.push_back(f);
  }
  // An episode only logs an off-track row as its last frame.
  trace.off_track = !trace.frames.empty() && !trace.frames.back().on_track;
  return trace;
}

EpisodeTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str(), path.string());
}

OracleDriver::OracleDriver(OracleParams params, double exec_noise, std::uint64_t seed)
    : params_(params), noise_sigma_(exec_noise), rng_(seed) {}

Decision OracleDriver::decide(const FrameContext& ctx) {
  const auto cmd = oracle_drive(ctx.world, ctx.pose, params_);
  Decision d;
  if (!cmd) return d;
  d.label = *cmd;
  d.command = *cmd;
  if (noise_sigma_ > 0.0) {
    constexpr double rho = 0.8;
    noise_ = rho * noise_ + noise_sigma_ * std::sqrt(1.0 - rho * rho) * rng_.normal();
    d.command.angular = clamp_unit(d.command.angular + noise_);
  }
  return d;
}

ModelDriver::ModelDriver(nn::Network& net, threshold::HsvThreshold threshold, imaging::BlurConfig blur)
    : net_(net), threshold_(std::move(threshold)), blur_(blur) {
  const nn::Shape& in = net_.input_shape();
  const nn::Shape& out = net_.output_shape();
  if (nn::numel(in) != imaging::kInputSize)
    throw ConfigError("model expects input " + nn::to_string(in) + " but the pipeline produces " +
                      std::to_string(imaging::kInputSize) + " values");
  if (nn::numel(out) != 2) throw ConfigError("model output " + nn::to_string(out) + " is not a velocity pair");
}

Decision ModelDriver::decide(const FrameContext& ctx) {
  if (!ctx.frame) throw UsageError("ModelDriver needs a rendered frame");
  const auto input = imaging::preprocess(*ctx.frame, threshold_, blur_);
  const auto p = models::predict_one(net_, input);
  Decision d;
  d.prediction = DriveCommand{p[0], p[1]};
  d.command = {clamp_unit(p[0]), clamp_unit(p[1])};
  return d;
}

Decision CommandDriver::decide(const FrameContext&) {
  Decision d;
  d.command = {clamp_unit(cmd_.linear), clamp_unit(cmd_.angular)};
  return d;
}

Pose start_pose(const TrackWorld& world, double s, double lateral, double heading) {
  const TrackSample ts = world.track().at(s);
  const Vec2 left{-std::sin(ts.heading), std::cos(ts.heading)};
  const Vec2 p = ts.pos + left * lateral;
  return {p.x, p.y, wrap_angle(ts.heading + heading)};
}

EpisodeRunner::EpisodeRunner(TrackWorld world, const SimConfig& config, Pose start, bool stop_on_completion)
    : world_(std::move(world)), config_(config), stop_on_completion_(stop_on_completion), renderer_(config.camera) {
  world_.validate();
  config_.validate();
  state_.pose = start;
  trace_.world = world_.name;
}

std::optional<EpisodeRunner::Step> EpisodeRunner::step(Driver& driver, bool want_frame) {
  if (finished_) return std::nullopt;
  const Track& track = world_.track();
  const std::size_t k = trace_.frames.size();
  const double dt = config_.camera.frame_period();
  Step st;
  st.record.frame = k;
  st.record.t = static_cast<double>(k) * dt;
  st.record.pose = state_.pose;
  const auto near = track.nearest(state_.pose.position(), config_.capture_radius);
  st.record.xtrack_err = near ? near->distance : distance_to_track(track, state_.pose.position(), 4.0 * config_.capture_radius);
  st.record.on_track = near.has_value();
  if (near) {
    if (k > 0) trace_.progress += track.delta_s(last_s_, near->s);
    last_s_ = near->s;
  }
  if (!st.record.on_track) {
    trace_.off_track = true;
    finished_ = true;
    trace_.frames.push_back(st.record);
    return st;
  }
  if (want_frame || driver.needs_frame()) st.frame = renderer_.render(world_, state_.pose);
  const FrameContext ctx{world_, state_.pose, st.frame.empty() ? nullptr : &st.frame, k, st.record.t};
  st.decision = driver.decide(ctx);
  st.record.command = st.decision.command;
  st.record.prediction = st.decision.prediction;
  trace_.frames.push_back(st.record);

  const bool done = track.closed() ? trace_.progress >= track.length()
                                   : near->s >= track.length() - kOpenEndMargin;
  if (done) {
    trace_.completed = true;
    if (stop_on_completion_ || !track.closed()) finished_ = true;
  }
  const double v = clamp_unit(st.decision.command.linear) * config_.v_max;
  const double w = clamp_unit(st.decision.command.angular) * config_.omega_max;
  state_ = step_kinematics(state_, v, w, dt);
  return st;
}

EpisodeTrace run_episode(const TrackWorld& world, Driver& driver, const SimConfig& config,
                         const EpisodeOptions& options) {
  EpisodeRunner runner(world, config, options.start.value_or(start_pose(world)), options.stop_on_completion);
  for (std::size_t i = 0; i < options.frames; ++i) {
    auto st = runner.step(driver, options.render_every_frame);
    if (!st) break;
    if (options.on_frame) options.on_frame(*st);
    if (runner.finished()) break;
  }
  return runner.take_trace();
}

EpisodeTrace replay_open_loop(const TrackWorld& world, const EpisodeTrace& reference, Driver& driver,
                              const SimConfig& config) {
  config.validate();
  const Renderer renderer(config.camera);
  EpisodeTrace out;
  out.world = world.name;
  out.completed = reference.completed;
  out.off_track = reference.off_track;
  out.progress = reference.progress;
  for (const auto& ref : reference.frames) {
    FrameRecord f = ref;
    f.prediction.reset();
    imaging::RgbImage frame;
    if (driver.needs_frame()) frame = renderer.render(world, ref.pose);
    const FrameContext ctx{world, ref.pose, frame.empty() ? nullptr : &frame, ref.frame, ref.t};
    const Decision d = driver.decide(ctx);
    f.command = d.command;
    f.prediction = d.prediction;
    out.frames.push_back(f);
  }
  return out;
}

TraceComparison compare_traces(const EpisodeTrace& model, const EpisodeTrace& reference) {
  if (model.frames.size() != reference.frames.size())
    throw ShapeError("compare_traces: " + std::to_string(model.frames.size()) + " frames vs " +
                     std::to_string(reference.frames.size()));
  if (model.frames.empty()) throw ShapeError("compare_traces: empty traces");
  TraceComparison c;
  c.frames = model.frames.size();
  for (std::size_t i = 0; i < c.frames; ++i) {
    const DriveCommand a = model.frames[i].decision(), b = reference.frames[i].decision();
    c.mae_linear += std::abs(a.linear - b.linear);
    c.mae_angular += std::abs(a.angular - b.angular);
  }
  c.mae_linear /= static_cast<double>(c.frames);
  c.mae_angular /= static_cast<double>(c.frames);
  return c;
}

}  // namespace linetrace::sim
