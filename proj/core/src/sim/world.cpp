// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linetrace/error.hpp"

namespace linetrace::sim {

using nlohmann::json;

bool Occluder::contains(Vec2 p) const {
  const Vec2 d = p - center;
  const double c = std::cos(angle), s = std::sin(angle);
  const double lx = c * d.x + s * d.y;
  const double ly = -s * d.x + c * d.y;
  return std::abs(lx) <= 0.5 * size.x && std::abs(ly) <= 0.5 * size.y;
}

Rgb color_by_name(const std::string& name) {
  static const std::map<std::string, Rgb> table = {
      {"yellow", {235, 200, 40}}, {"pink", {240, 100, 170}}, {"blue", {40, 90, 220}},
      {"green", {40, 170, 70}},   {"red", {210, 40, 40}},    {"orange", {245, 140, 30}},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown line color '" + name + "'");
  return it->second;
}

TrackWorld::TrackWorld(std::string world_name, std::vector<Vec2> waypoints, bool closed)
    : name(std::move(world_name)), track_(std::make_shared<const Track>(std::move(waypoints), closed)) {}

TrackWorld TrackWorld::with_lighting(double lambda) const {
  TrackWorld w = *this;
  w.lighting = lambda;
  w.validate();
  return w;
}

TrackWorld TrackWorld::with_occluders(std::vector<Occluder> occ) const {
  TrackWorld w = *this;
  w.occluders = std::move(occ);
  w.validate();
  return w;
}

TrackWorld TrackWorld::with_color(const std::string& color_name) const {
  TrackWorld w = *this;
  w.line_rgb = color_by_name(color_name);
  w.color = color_name;
  return w;
}

void TrackWorld::validate() const {
  if (!(line_width > 0.0)) throw ConfigError("world '" + name + "': line width must be > 0");
  if (!(lighting > 0.0 && lighting <= 1.0)) throw ConfigError("world '" + name + "': lighting must be in (0, 1]");
  if (track_->waypoints().size() < 3) throw ConfigError("world '" + name + "': need at least 3 waypoints");
  for (const auto& o : occluders)
    if (!(o.size.x > 0.0) || !(o.size.y > 0.0)) throw ConfigError("world '" + name + "': occluder size must be > 0");
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

json parse_doc(const std::string& text, const std::string& source) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ParseError(source, 0, "", "expected a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of_offset(text, e.byte), "", "malformed JSON");
  }
}

double number(const json& obj, const std::string& key, const std::string& source, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError(source, 0, path + key, "missing");
  }
  if (!obj[key].is_number()) throw ParseError(source, 0, path + key, "expected a number");
  return obj[key].get<double>();
}

Vec2 vec2(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(source, 0, field, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Rgb rgb(const json& v, const std::string& source, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ParseError(source, 0, field, "expected [r, g, b]");
  Rgb out{};
  for (std::size_t c = 0; c < 3; ++c) {
    if (!v[c].is_number_integer() || v[c].get<int>() < 0 || v[c].get<int>() > 255)
      throw ParseError(source, 0, field, "channels must be integers in [0, 255]");
    out[c] = static_cast<std::uint8_t>(v[c].get<int>());
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TrackWorld world_from_json(const std::string& text, const std::string& source) {
  const json doc = parse_doc(text, source);
  if (!doc.contains("waypoints") || !doc["waypoints"].is_array())
    throw ParseError(source, 0, "waypoints", "missing or not an array");
  std::vector<Vec2> wps;
  for (std::size_t i = 0; i < doc["waypoints"].size(); ++i)
    wps.push_back(vec2(doc["waypoints"][i], source, "waypoints[" + std::to_string(i) + "]"));
  if (wps.size() < 3) throw ParseError(source, 0, "waypoints", "need at least 3 waypoints");
  bool closed = true;
  if (doc.contains("closed")) {
    if (!doc["closed"].is_boolean()) throw ParseError(source, 0, "closed", "expected a boolean");
    closed = doc["closed"].get<bool>();
  }
  std::string name = "world";
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError(source, 0, "name", "expected a string");
    name = doc["name"].get<std::string>();
  }
  TrackWorld w = [&] {
    try {
      return TrackWorld(name, std::move(wps), closed);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, 0, "waypoints", e.what());
    }
  }();
  w.line_width = number(doc, "line_width", source, "", 0.05);
  if (doc.contains("color")) {
    if (!doc["color"].is_string()) throw ParseError(source, 0, "color", "expected a string");
    w.color = doc["color"].get<std::string>();
    try {
      w.line_rgb = color_by_name(w.color);
    } catch (const ConfigError&) {
      if (!doc.contains("line_rgb")) throw ParseError(source, 0, "color", "unknown color and no line_rgb given");
    }
  }
  if (doc.contains("line_rgb")) w.line_rgb = rgb(doc["line_rgb"], source, "line_rgb");
  if (doc.contains("background_rgb")) w.background_rgb = rgb(doc["background_rgb"], source, "background_rgb");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ParseError(source, 0, "seed", "expected a non-negative integer");
    w.seed = doc["seed"].get<std::uint64_t>();
  }
  w.lighting = number(doc, "lighting", source, "", 1.0);
  if (doc.contains("occluders")) {
    if (!doc["occluders"].is_array()) throw ParseError(source, 0, "occluders", "expected an array");
    for (std::size_t i = 0; i < doc["occluders"].size(); ++i) {
      const json& o = doc["occluders"][i];
      const std::string at = "occluders[" + std::to_string(i) + "]";
      if (!o.is_object()) throw ParseError(source, 0, at, "expected an object");
      Occluder occ;
      if (!o.contains("center")) throw ParseError(source, 0, at + ".center", "missing");
      if (!o.contains("size")) throw ParseError(source, 0, at + ".size", "missing");
      occ.center = vec2(o["center"], source, at + ".center");
      occ.size = vec2(o["size"], source, at + ".size");
      occ.angle = number(o, "angle", source, at + ".", 0.0);
      if (o.contains("rgb")) occ.rgb = rgb(o["rgb"], source, at + ".rgb");
      w.occluders.push_back(occ);
    }
  }
  try {
    w.validate();
  } catch (const ConfigError& e) {
    throw ParseError(source, 0, "", e.what());
  }
  return w;
}

std::string world_to_json(const TrackWorld& w) {
  json wps = json::array();
  for (const auto& p : w.track().waypoints()) wps.push_back({p.x, p.y});
  json occ = json::array();
  for (const auto& o : w.occluders)
    occ.push_back({{"center", {o.center.x, o.center.y}},
                   {"size", {o.size.x, o.size.y}},
                   {"angle", o.angle},
                   {"rgb", {o.rgb[0], o.rgb[1], o.rgb[2]}}});
  json doc = {{"name", w.name},
              {"closed", w.closed()},
              {"waypoints", std::move(wps)},
              {"line_width", w.line_width},
              {"color", w.color},
              {"line_rgb", {w.line_rgb[0], w.line_rgb[1], w.line_rgb[2]}},
              {"background_rgb", {w.background_rgb[0], w.background_rgb[1], w.background_rgb[2]}},
              {"seed", w.seed},
              {"lighting", w.lighting},
              {"occluders", std::move(occ)}};
  return doc.dump(2) + "\n";
}

TrackWorld load_world(const std::filesystem::path& path) { return world_from_json(read_text(path), path.string()); }

void save_world(const TrackWorld& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << world_to_json(world);
}

std::vector<Vec2> waypoints_from_curvature(Pose start, const std::vector<std::pair<double, double>>& pieces,
                                           double step) {
  std::vector<Vec2> out{start.position()};
  RobotState st{start, 0.0, 0.0};
  double carry = 0.0;  // distance travelled since the last waypoint
  for (const auto& [length, kappa] : pieces) {
    double left = length;
    while (left > 1e-12) {
      const double ds = std::min(step - carry, left);
      st = step_kinematics(st, ds, kappa * ds, 1.0);
      left -= ds;
      carry += ds;
      if (carry >= step - 1e-12) {
        out.push_back(st.pose.position());
        carry = 0.0;
      }
    }
  }
  if (carry > 0.25 * step) out.push_back(st.pose.position());
  return out;
}

namespace presets {

TrackWorld oval() {
  constexpr double straight = 2.0, radius = 1.5;
  std::vector<Vec2> wps =
      waypoints_from_curvature({-0.5 * straight, -radius, 0.0}, {{straight, 0.0},
                                                                 {std::numbers::pi * radius, 1.0 / radius},
                                                                 {straight, 0.0},
                                                                 {std::numbers::pi * radius, 1.0 / radius}});
  wps.pop_back();  // back at the start point
  TrackWorld w("oval", std::move(wps), true);
  w.seed = 11;
  return w;
}

TrackWorld s_curve() {
  TrackWorld w("s_curve",
               waypoints_from_curvature({0.0, 0.0, 0.0}, {{1.0, 0.0}, {2.5, 0.6}, {0.6, 0.0}, {2.5, -0.6}, {1.0, 0.0}}),
               false);
  w.seed = 23;
  return w;
}

TrackWorld test_loop() {
  // r(phi) = a + b cos(3 phi): radius of curvature stays above ~1.5 m.
  constexpr double a = 2.5, b = 0.25;
  std::vector<Vec2> wps;
  constexpr int n = 60;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / n;
    const double r = a + b * std::cos(3.0 * phi);
    wps.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  TrackWorld w("test_loop", std::move(wps), true);
  w.seed = 37;
  w.color = "pink";
  w.line_rgb = color_by_name("pink");
  w.background_rgb = {110, 112, 104};
  return w;
}

}  // namespace presets

void SimConfig::validate() const {
  camera.validate();
  if (!(v_max > 0.0) || !(omega_max > 0.0)) throw ConfigError("sim config: speed limits must be > 0");
  if (!(capture_radius > 0.0)) throw ConfigError("sim config: capture radius must be > 0");
  if (!(oracle.lookahead > 0.0) || !(oracle.k_alpha > 0.0) || oracle.k_curvature < 0.0)
    throw ConfigError("sim config: bad oracle gains");
  if (!(oracle.v_floor_frac > 0.0 && oracle.v_floor_frac <= 1.0))
    throw ConfigError("sim config: oracle v_floor_frac must be in (0, 1]");
  if (blur.kernel_size < 1 || blur.kernel_size % 2 == 0 || !(blur.sigma > 0.0))
    throw ConfigError("sim config: blur needs an odd kernel and sigma > 0");
}

SimConfig sim_config_from_json(const std::string& text, const std::string& source) {
  const json doc = parse_doc(text, source);
  SimConfig cfg;
  if (doc.contains("camera")) {
    const json& c = doc["camera"];
    if (!c.is_object()) throw ParseError(source, 0, "camera", "expected an object");
    const double near = number(c, "near", source, "camera.", 0.3);
    const double far = number(c, "far", source, "camera.", 1.0);
    const double height = number(c, "mount_height", source, "camera.", 0.5);
    const double fps = number(c, "fps", source, "camera.", 6.0);
    const int w = static_cast<int>(number(c, "width", source, "camera.", 640));
    const int h = static_cast<int>(number(c, "height", source, "camera.", 480));
    try {
      cfg.camera = CameraModel::from_footprint(near, far, height, w, h, fps);
    } catch (const ConfigError& e) {
      throw ParseError(source, 0, "camera", e.what());
    }
  }
  cfg.v_max = number(doc, "v_max", source, "", cfg.v_max);
  cfg.omega_max = number(doc, "omega_max", source, "", cfg.omega_max);
  cfg.capture_radius = number(doc, "capture_radius", source, "", cfg.capture_radius);
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    if (!o.is_object()) throw ParseError(source, 0, "oracle", "expected an object");
    cfg.oracle.lookahead = number(o, "lookahead", source, "oracle.", cfg.oracle.lookahead);
    cfg.oracle.k_alpha = number(o, "k_alpha", source, "oracle.", cfg.oracle.k_alpha);
    cfg.oracle.k_curvature = number(o, "k_curvature", source, "oracle.", cfg.oracle.k_curvature);
    cfg.oracle.v_floor_frac = number(o, "v_floor_frac", source, "oracle.", cfg.oracle.v_floor_frac);
  }
  if (doc.contains("blur")) {
    const json& b = doc["blur"];
    if (!b.is_object()) throw ParseError(source, 0, "blur", "expected an object");
    cfg.blur.kernel_size = static_cast<int>(number(b, "kernel_size", source, "blur.", cfg.blur.kernel_size));
    cfg.blur.sigma = number(b, "sigma", source, "blur.", cfg.blur.sigma);
  }
  cfg.oracle.v_max = cfg.v_max;
  cfg.oracle.capture_distance = cfg.capture_radius;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(source, 0, "", e.what());
  }
  return cfg;
}

std::string sim_config_to_json(const SimConfig& cfg) {
  const CameraModel& c = cfg.camera;
  const double near = c.mount_forward + c.mount_height / std::tan(c.pitch + 0.5 * c.vfov);
  const double far = c.mount_forward + c.mount_height / std::tan(c.pitch - 0.5 * c.vfov);
  json doc = {{"camera",
               {{"near", near},
                {"far", far},
                {"mount_height", c.mount_height},
                {"width", c.width},
                {"height", c.height},
                {"fps", c.fps}}},
              {"v_max", cfg.v_max},
              {"omega_max", cfg.omega_max},
              {"capture_radius", cfg.capture_radius},
              {"oracle",
               {{"lookahead", cfg.oracle.lookahead},
                {"k_alpha", cfg.oracle.k_alpha},
                {"k_curvature", cfg.oracle.k_curvature},
                {"v_floor_frac", cfg.oracle.v_floor_frac}}},
              {"blur", {{"kernel_size", cfg.blur.kernel_size}, {"sigma", cfg.blur.sigma}}}};
  return doc.dump(2) + "\n";
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  return sim_config_from_json(read_text(path), path.string());
}

}  // namespace linetrace::sim
