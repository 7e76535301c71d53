// SPDX-License-Identifier: Apache-2.0
#include "linetrace/sim/survey.hpp"

#include "linetrace/error.hpp"
#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/sim/episode.hpp"
#include "linetrace/sim/render.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::sim {

threshold::LabeledPixelSet survey_pixels(const TrackWorld& world, const SimConfig& config,
                                         const SurveyOptions& options) {
  if (options.images <= 0 || options.pixels_per_image <= 0) throw ConfigError("survey: counts must be > 0");
  if (!(options.lighting_min > 0.0) || options.lighting_max > 1.0 || options.lighting_min > options.lighting_max)
    throw ConfigError("survey: lighting range must lie in (0, 1]");
  const Renderer renderer(config.camera);
  Rng rng(options.seed);
  threshold::LabeledPixelSet set;
  const Track& track = world.track();
  for (int i = 0; i < options.images; ++i) {
    const double s = rng.uniform(0.0, track.closed() ? track.length() : std::max(0.0, track.length() - 1.0));
    const Pose pose = start_pose(world, s, rng.uniform(-options.lateral, options.lateral),
                                 rng.uniform(-options.heading, options.heading));
    const TrackWorld lit = world.with_lighting(rng.uniform(options.lighting_min, options.lighting_max));
    imaging::BinaryMask truth;
    const imaging::RgbImage raw = renderer.render(lit, pose, truth);
    const imaging::HsvImage hsv =
        imaging::rgb_to_hsv(imaging::gaussian_blur(raw, config.blur.kernel_size, config.blur.sigma));
    const auto w = static_cast<std::uint64_t>(raw.width()), h = static_cast<std::uint64_t>(raw.height());
    for (int k = 0; k < options.pixels_per_image; ++k) {
      const auto idx = rng.below(w * h);
      const int x = static_cast<int>(idx % w), y = static_cast<int>(idx / w);
      set.add(hsv.at(x, y), truth.at(x, y) ? threshold::Label::Line : threshold::Label::NonLine);
    }
  }
  return set;
}

}  // namespace linetrace::sim
