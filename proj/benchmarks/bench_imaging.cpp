// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "linetrace/imaging/pipeline.hpp"
#include "linetrace/sim/render.hpp"
#include "linetrace/threshold/gini_tree.hpp"
#include "linetrace/util/rng.hpp"

using namespace linetrace;

namespace {

imaging::RgbImage camera_frame() {
  const sim::TrackWorld world = sim::presets::oval();
  const auto s = world.track().at(1.0);
  return sim::render_camera(world, {s.pos.x, s.pos.y, s.heading}, sim::CameraModel::standard());
}

threshold::HsvThreshold yellow() {
  return {"yellow",
          {{{threshold::Axis::H, threshold::Comparator::Lt, 0.2}, {threshold::Axis::S, threshold::Comparator::Ge, 0.5}}}};
}

}  // namespace

static void BM_GaussianBlur(benchmark::State& state) {
  const imaging::RgbImage img = camera_frame();
  for (auto _ : state) benchmark::DoNotOptimize(imaging::gaussian_blur(img, 5, 1.0));
}
BENCHMARK(BM_GaussianBlur)->Unit(benchmark::kMillisecond);

static void BM_RgbToHsv(benchmark::State& state) {
  const imaging::RgbImage img = camera_frame();
  for (auto _ : state) benchmark::DoNotOptimize(imaging::rgb_to_hsv(img));
}
BENCHMARK(BM_RgbToHsv)->Unit(benchmark::kMillisecond);

// Whole 640x480 frame to 1024-vector; the robot's budget is 1/6 s.
static void BM_Preprocess(benchmark::State& state) {
  const imaging::RgbImage img = camera_frame();
  const threshold::HsvThreshold thr = yellow();
  for (auto _ : state) benchmark::DoNotOptimize(imaging::preprocess(img, thr));
}
BENCHMARK(BM_Preprocess)->Unit(benchmark::kMillisecond);

static void BM_FitTree(benchmark::State& state) {
  Rng rng(1);
  threshold::LabeledPixelSet set;
  for (int i = 0; i < state.range(0); ++i) {
    const imaging::HsvPixel px{rng.uniform(), rng.uniform(), rng.uniform()};
    set.add(px, px.h < 0.2 && px.v >= 0.4 ? threshold::Label::Line : threshold::Label::NonLine);
  }
  for (auto _ : state) benchmark::DoNotOptimize(threshold::fit_tree(set, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitTree)->Arg(5000)->Arg(80000)->Unit(benchmark::kMillisecond);
