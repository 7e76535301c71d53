// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/camera.hpp"

#include <cmath>

#include "linetrace/error.hpp"

namespace linetrace::sim {

CameraModel CameraModel::from_footprint(double near, double far, double mount_height, int width, int height,
                                        double fps) {
  if (!(near > 0.0) || !(far > near) || !(mount_height > 0.0))
    throw ConfigError("camera footprint needs 0 < near < far and a positive height");
  CameraModel m;
  m.width = width;
  m.height = height;
  m.fps = fps;
  m.mount_height = mount_height;
  const double a_near = std::atan(mount_height / near);
  const double a_far = std::atan(mount_height / far);
  m.pitch = 0.5 * (a_near + a_far);
  m.vfov = a_near - a_far;
  m.hfov = 2.0 * std::atan(std::tan(0.5 * m.vfov) * width / height);
  m.validate();
  return m;
}

CameraModel CameraModel::standard() { return from_footprint(0.3, 1.0); }

void CameraModel::validate() const {
  if (width < 32 || height < 32) throw ConfigError("camera: image must be at least 32x32");
  if (!(fps > 0.0)) throw ConfigError("camera: fps must be > 0");
  if (!(mount_height > 0.0)) throw ConfigError("camera: mount height must be > 0");
  if (!(vfov > 0.0) || !(hfov > 0.0) || hfov >= 3.0) throw ConfigError("camera: bad field of view");
  if (!(pitch - 0.5 * vfov > 1e-3)) throw ConfigError("camera: upper image edge does not reach the floor");
  if (pitch + 0.5 * vfov > 1.5707963267948966) throw ConfigError("camera: lower image edge points backwards");
}

namespace {

struct Basis {
  double sp, cp, tx, ty;
};

Basis basis(const CameraModel& m) {
  return {std::sin(m.pitch), std::cos(m.pitch), std::tan(0.5 * m.hfov), std::tan(0.5 * m.vfov)};
}

}  // namespace

CameraRig::CameraRig(const CameraModel& model) : model_(model) {
  model_.validate();
  const Basis b = basis(model_);
  offsets_.resize(static_cast<std::size_t>(model_.width) * static_cast<std::size_t>(model_.height));
  for (int y = 0; y < model_.height; ++y) {
    const double yc = b.ty * (2.0 * (y + 0.5) / model_.height - 1.0);
    // Ray = xc * right + yc * down + forward, with
    // right = (0,-1,0), down = (-sp,0,-cp), forward = (cp,0,-sp).
    const double dir_f = b.cp - yc * b.sp;
    const double dir_z = -(b.sp + yc * b.cp);
    const double t = model_.mount_height / -dir_z;
    for (int x = 0; x < model_.width; ++x) {
      const double xc = b.tx * (2.0 * (x + 0.5) / model_.width - 1.0);
      const Vec2 g{model_.mount_forward + t * dir_f, -t * xc};
      offsets_[static_cast<std::size_t>(y) * static_cast<std::size_t>(model_.width) + static_cast<std::size_t>(x)] = g;
      reach_ = std::max(reach_, g.norm());
    }
  }
}

std::optional<Vec2> CameraRig::project(Vec2 local) const {
  const Basis b = basis(model_);
  const double f = local.x - model_.mount_forward;
  const double h = model_.mount_height;
  const double xc = -local.y;
  const double yc = -f * b.sp + h * b.cp;
  const double zc = f * b.cp + h * b.sp;
  if (!(zc > 1e-9)) return std::nullopt;
  const double u = ((xc / zc) / b.tx + 1.0) * 0.5 * model_.width - 0.5;
  const double v = ((yc / zc) / b.ty + 1.0) * 0.5 * model_.height - 0.5;
  if (u < -0.5 || v < -0.5 || u >= model_.width - 0.5 || v >= model_.height - 0.5) return std::nullopt;
  return Vec2{u, v};
}

}  // namespace linetrace::sim
