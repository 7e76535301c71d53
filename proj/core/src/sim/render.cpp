// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/render.hpp"

#include <algorithm>
#include <cmath>

#include "linetrace/util/rng.hpp"

namespace linetrace::sim {

namespace {

constexpr double kFineCell = 0.005;   // metres
constexpr double kBlotchCell = 0.35;  // metres

double hash_unit(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::uint64_t salt) {
  const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL ^
                                             mix64(static_cast<std::uint64_t>(iy) + salt)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
}

double fine_noise(std::uint64_t seed, Vec2 g, std::uint64_t salt) {
  return hash_unit(seed, static_cast<std::int64_t>(std::floor(g.x / kFineCell)),
                   static_cast<std::int64_t>(std::floor(g.y / kFineCell)), salt);
}

// Bilinear value noise on a coarse lattice with smoothstep weights.
double blotch_noise(std::uint64_t seed, Vec2 g, std::uint64_t salt) {
  const double fx = g.x / kBlotchCell, fy = g.y / kBlotchCell;
  const double x0 = std::floor(fx), y0 = std::floor(fy);
  const auto ix = static_cast<std::int64_t>(x0), iy = static_cast<std::int64_t>(y0);
  double u = fx - x0, v = fy - y0;
  u = u * u * (3.0 - 2.0 * u);
  v = v * v * (3.0 - 2.0 * v);
  const double a = hash_unit(seed, ix, iy, salt), b = hash_unit(seed, ix + 1, iy, salt);
  const double c = hash_unit(seed, ix, iy + 1, salt), d = hash_unit(seed, ix + 1, iy + 1, salt);
  return (a * (1 - u) + b * u) * (1 - v) + (c * (1 - u) + d * u) * v;
}

std::uint8_t clamp_u8(double x) { return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L)); }

}  // namespace

Renderer::Renderer(const CameraModel& camera) : rig_(camera) {}

imaging::RgbImage Renderer::render(const TrackWorld& world, const Pose& pose) const {
  return render_impl(world, pose, nullptr);
}

imaging::RgbImage Renderer::render(const TrackWorld& world, const Pose& pose, imaging::BinaryMask& truth) const {
  return render_impl(world, pose, &truth);
}

imaging::RgbImage Renderer::render_impl(const TrackWorld& world, const Pose& pose, imaging::BinaryMask* truth) const {
  const CameraModel& cam = rig_.model();
  const int w = cam.width, h = cam.height;
  imaging::RgbImage img(w, h);
  if (truth) *truth = imaging::BinaryMask(w, h, 0);
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  const double half_width = 0.5 * world.line_width;
  const Track& track = world.track();
  const std::uint64_t seed = world.seed;
  std::uint8_t* px = img.data().data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x, px += 3) {
      const Vec2 o = rig_.ground_offset(x, y);
      const Vec2 g{pose.x + c * o.x - s * o.y, pose.y + s * o.x + c * o.y};
      const Occluder* occ = nullptr;
      for (const auto& oc : world.occluders)
        if (oc.contains(g)) {
          occ = &oc;
          break;
        }
      double rgb[3];
      if (occ) {
        const double n = 8.0 * fine_noise(seed, g, 7);
        for (int k = 0; k < 3; ++k) rgb[k] = occ->rgb[k] + n;
      } else if (track.within(g, half_width)) {
        const double n = 10.0 * fine_noise(seed, g, 5);
        for (int k = 0; k < 3; ++k) rgb[k] = world.line_rgb[k] + n;
        if (truth) truth->set(x, y, true);
      } else {
        const double grain = 20.0 * fine_noise(seed, g, 1);
        const double shade = 40.0 * blotch_noise(seed, g, 2);
        const double tint = 12.0 * blotch_noise(seed, g, 3);
        rgb[0] = world.background_rgb[0] + grain + shade + tint + 5.0 * fine_noise(seed, g, 4);
        rgb[1] = world.background_rgb[1] + grain + shade + 5.0 * fine_noise(seed, g, 6);
        rgb[2] = world.background_rgb[2] + grain + shade - tint + 5.0 * fine_noise(seed, g, 8);
      }
      for (int k = 0; k < 3; ++k) px[k] = clamp_u8(rgb[k]);
    }
  if (world.lighting != 1.0) return apply_lighting(img, world.lighting);
  return img;
}

imaging::RgbImage render_camera(const TrackWorld& world, const Pose& pose, const CameraModel& camera) {
  return Renderer(camera).render(world, pose);
}

imaging::RgbImage apply_lighting(const imaging::RgbImage& img, double lambda) {
  imaging::RgbImage out = img;
  for (auto& v : out.data()) v = clamp_u8(lambda * v);
  return out;
}

}  // namespace linetrace::sim
