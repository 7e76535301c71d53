// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linetrace::sim {

namespace {

constexpr int kSubsteps = 256;
constexpr double kCurvatureWindow = 0.04;

// Barry-Goldman evaluation of the centripetal (alpha = 0.5) segment p1 -> p2.
Vec2 catmull_rom(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3, double u) {
  auto knot = [](double t, Vec2 a, Vec2 b) { return t + std::max(std::sqrt((b - a).norm()), 1e-9); };
  const double t0 = 0.0;
  const double t1 = knot(t0, p0, p1);
  const double t2 = knot(t1, p1, p2);
  const double t3 = knot(t2, p2, p3);
  const double t = t1 + u * (t2 - t1);
  auto lerp = [](Vec2 a, Vec2 b, double ta, double tb, double tt) {
    return a * ((tb - tt) / (tb - ta)) + b * ((tt - ta) / (tb - ta));
  };
  const Vec2 a1 = lerp(p0, p1, t0, t1, t);
  const Vec2 a2 = lerp(p1, p2, t1, t2, t);
  const Vec2 a3 = lerp(p2, p3, t2, t3, t);
  const Vec2 b1 = lerp(a1, a2, t0, t2, t);
  const Vec2 b2 = lerp(a2, a3, t1, t3, t);
  return lerp(b1, b2, t1, t2, t);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* u_out) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double u = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  if (u_out) *u_out = u;
  return (p - (a + ab * u)).norm();
}

}  // namespace

Track::Track(std::vector<Vec2> waypoints, bool closed, double spacing)
    : waypoints_(std::move(waypoints)), closed_(closed), spacing_(spacing) {
  if (!(spacing_ > 0.0)) throw std::invalid_argument("Track: spacing must be > 0");
  if (waypoints_.size() < (closed_ ? 3u : 2u))
    throw std::invalid_argument("Track: need at least 3 waypoints (closed) or 2 (open)");
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (!std::isfinite(waypoints_[i].x) || !std::isfinite(waypoints_[i].y))
      throw std::invalid_argument("Track: non-finite waypoint");
    const std::size_t j = (i + 1) % waypoints_.size();
    if ((j != 0 || closed_) && (waypoints_[j] - waypoints_[i]).norm() < 1e-6)
      throw std::invalid_argument("Track: repeated waypoint");
  }

  // Dense polyline along the spline.
  const std::size_t n = waypoints_.size();
  const std::size_t spans = closed_ ? n : n - 1;
  auto wp = [&](long i) -> Vec2 {
    if (closed_) return waypoints_[static_cast<std::size_t>((i % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n))];
    if (i < 0) return waypoints_[0] * 2.0 - waypoints_[1];
    if (i >= static_cast<long>(n)) return waypoints_[n - 1] * 2.0 - waypoints_[n - 2];
    return waypoints_[static_cast<std::size_t>(i)];
  };
  std::vector<Vec2> dense;
  dense.reserve(spans * kSubsteps + 1);
  for (std::size_t k = 0; k < spans; ++k) {
    const long i = static_cast<long>(k);
    for (int m = 0; m < kSubsteps; ++m)
      dense.push_back(catmull_rom(wp(i - 1), wp(i), wp(i + 1), wp(i + 2), static_cast<double>(m) / kSubsteps));
  }
  dense.push_back(closed_ ? waypoints_[0] : waypoints_[n - 1]);

  std::vector<double> cum(dense.size(), 0.0);
  for (std::size_t i = 1; i < dense.size(); ++i) cum[i] = cum[i - 1] + (dense[i] - dense[i - 1]).norm();
  length_ = cum.back();

  // Uniform arc-length resampling. Closed tracks omit the duplicate endpoint.
  const auto count = static_cast<std::size_t>(std::max(2.0, std::round(length_ / spacing_)));
  spacing_ = length_ / static_cast<double>(count);
  const std::size_t stored = closed_ ? count : count + 1;
  samples_.resize(stored);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < stored; ++i) {
    const double s = std::min(static_cast<double>(i) * spacing_, length_);
    while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
    const double span = cum[seg + 1] - cum[seg];
    const double u = span > 0.0 ? (s - cum[seg]) / span : 0.0;
    samples_[i].pos = dense[seg] + (dense[seg + 1] - dense[seg]) * u;
    samples_[i].s = s;
  }
  for (std::size_t i = 0; i < stored; ++i) {
    const std::size_t a = i == 0 ? (closed_ ? stored - 1 : 0) : i - 1;
    const std::size_t b = i + 1 == stored ? (closed_ ? 0 : i) : i + 1;
    const Vec2 d = samples_[b].pos - samples_[a].pos;
    samples_[i].heading = std::atan2(d.y, d.x);
  }
  const auto w = static_cast<long>(std::max(1.0, std::round(kCurvatureWindow / spacing_)));
  for (std::size_t i = 0; i < stored; ++i) {
    long a = static_cast<long>(i) - w, b = static_cast<long>(i) + w;
    const long ns = static_cast<long>(stored);
    if (closed_) {
      a = (a % ns + ns) % ns;
      b = b % ns;
    } else {
      a = std::max(0L, a);
      b = std::min(ns - 1, b);
    }
    const double ds = static_cast<double>(closed_ ? 2 * w : (b - a)) * spacing_;
    samples_[i].curvature =
        ds > 0.0 ? wrap_angle(samples_[static_cast<std::size_t>(b)].heading - samples_[static_cast<std::size_t>(a)].heading) / ds : 0.0;
  }
  segment_count_ = closed_ ? stored : stored - 1;
  build_grid();
}

void Track::build_grid() {
  lo_ = hi_ = samples_[0].pos;
  for (const auto& s : samples_) {
    lo_ = {std::min(lo_.x, s.pos.x), std::min(lo_.y, s.pos.y)};
    hi_ = {std::max(hi_.x, s.pos.x), std::max(hi_.y, s.pos.y)};
  }
  gx_ = static_cast<int>(std::floor((hi_.x - lo_.x) / cell_)) + 1;
  gy_ = static_cast<int>(std::floor((hi_.y - lo_.y) / cell_)) + 1;
  std::vector<std::vector<std::uint32_t>> cells(static_cast<std::size_t>(gx_) * static_cast<std::size_t>(gy_));
  for (std::size_t i = 0; i < segment_count_; ++i) {
    const Vec2 a = samples_[i].pos;
    const Vec2 b = samples_[(i + 1) % samples_.size()].pos;
    const int x0 = static_cast<int>(std::floor((std::min(a.x, b.x) - lo_.x) / cell_));
    const int x1 = static_cast<int>(std::floor((std::max(a.x, b.x) - lo_.x) / cell_));
    const int y0 = static_cast<int>(std::floor((std::min(a.y, b.y) - lo_.y) / cell_));
    const int y1 = static_cast<int>(std::floor((std::max(a.y, b.y) - lo_.y) / cell_));
    for (int y = std::max(0, y0); y <= std::min(gy_ - 1, y1); ++y)
      for (int x = std::max(0, x0); x <= std::min(gx_ - 1, x1); ++x)
        cells[static_cast<std::size_t>(y) * static_cast<std::size_t>(gx_) + static_cast<std::size_t>(x)].push_back(
            static_cast<std::uint32_t>(i));
  }
  cell_start_.assign(cells.size() + 1, 0);
  for (std::size_t c = 0; c < cells.size(); ++c)
    cell_start_[c + 1] = cell_start_[c] + static_cast<std::uint32_t>(cells[c].size());
  cell_items_.clear();
  cell_items_.reserve(cell_start_.back());
  for (const auto& c : cells) cell_items_.insert(cell_items_.end(), c.begin(), c.end());
}

template <class F>
void Track::for_segments_near(Vec2 p, double r, F&& f) const {
  const int x0 = std::max(0, static_cast<int>(std::floor((p.x - r - lo_.x) / cell_)));
  const int x1 = std::min(gx_ - 1, static_cast<int>(std::floor((p.x + r - lo_.x) / cell_)));
  const int y0 = std::max(0, static_cast<int>(std::floor((p.y - r - lo_.y) / cell_)));
  const int y1 = std::min(gy_ - 1, static_cast<int>(std::floor((p.y + r - lo_.y) / cell_)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const std::size_t c = static_cast<std::size_t>(y) * static_cast<std::size_t>(gx_) + static_cast<std::size_t>(x);
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k)
        if (f(cell_items_[k])) return;
    }
}

TrackSample Track::at(double s) const {
  if (closed_) {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
  } else {
    s = std::clamp(s, 0.0, length_);
  }
  const double f = s / spacing_;
  auto i = static_cast<std::size_t>(std::floor(f));
  if (!closed_ && i + 1 >= samples_.size()) return samples_.back();
  i = std::min(i, samples_.size() - 1);
  const std::size_t j = (i + 1) % samples_.size();
  const double u = f - static_cast<double>(i);
  TrackSample out = samples_[i];
  out.pos = samples_[i].pos + (samples_[j].pos - samples_[i].pos) * u;
  out.s = s;
  out.heading = samples_[i].heading + wrap_angle(samples_[j].heading - samples_[i].heading) * u;
  out.curvature = samples_[i].curvature + (samples_[j].curvature - samples_[i].curvature) * u;
  return out;
}

double Track::curvature_at(double s) const { return at(s).curvature; }

double Track::delta_s(double a, double b) const {
  const double d = b - a;
  if (!closed_) return d;
  double r = std::remainder(d, length_);
  if (r <= -0.5 * length_) r += length_;
  return r;
}

std::optional<NearestPoint> Track::nearest(Vec2 p, double max_distance) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_u = 0.0;
  for_segments_near(p, max_distance, [&](std::uint32_t i) {
    const Vec2 a = samples_[i].pos;
    const Vec2 b = samples_[(i + 1) % samples_.size()].pos;
    double u = 0.0;
    const double d = point_segment_distance(p, a, b, &u);
    if (d < best || (d == best && i < best_seg)) {
      best = d;
      best_seg = i;
      best_u = u;
    }
    return false;
  });
  if (!(best <= max_distance)) return std::nullopt;
  NearestPoint out;
  out.distance = best;
  out.s = (static_cast<double>(best_seg) + best_u) * spacing_;
  if (out.s >= length_ && closed_) out.s -= length_;
  const TrackSample ts = at(out.s);
  out.point = ts.pos;
  out.heading = ts.heading;
  return out;
}

bool Track::within(Vec2 p, double r) const {
  bool hit = false;
  for_segments_near(p, r, [&](std::uint32_t i) {
    hit = point_segment_distance(p, samples_[i].pos, samples_[(i + 1) % samples_.size()].pos, nullptr) <= r;
    return hit;
  });
  return hit;
}

}  // namespace linetrace::sim
