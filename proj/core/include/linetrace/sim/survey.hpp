// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "linetrace/sim/world.hpp"
#include "linetrace/threshold/gini_tree.hpp"

namespace linetrace::sim {

/// Labeled pixels for threshold training, taken from frames rendered at
/// random poses near the track under random lighting. Pixels are blurred and
/// converted to HSV exactly as the pipeline does; labels come from the
/// renderer's ground truth.
struct SurveyOptions {
  int images = 20;
  int pixels_per_image = 4000;
  double lighting_min = 0.35;
  double lighting_max = 1.0;
  double lateral = 0.15;  ///< max pose offset from the centerline, metres
  double heading = 0.35;  ///< max heading offset, radians
  std::uint64_t seed = 0;
};

threshold::LabeledPixelSet survey_pixels(const TrackWorld& world, const SimConfig& config,
                                         const SurveyOptions& options = {});

}  // namespace linetrace::sim
