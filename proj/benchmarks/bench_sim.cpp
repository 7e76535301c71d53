// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "linetrace/sim/episode.hpp"
#include "linetrace/sim/occlusion.hpp"
#include "linetrace/sim/render.hpp"

using namespace linetrace;

static void BM_RenderFrame(benchmark::State& state) {
  const sim::TrackWorld world = sim::presets::test_loop();
  const sim::Renderer renderer(sim::CameraModel::standard());
  const auto s = world.track().at(2.0);
  const sim::Pose pose{s.pos.x, s.pos.y, s.heading};
  for (auto _ : state) benchmark::DoNotOptimize(renderer.render(world, pose));
}
BENCHMARK(BM_RenderFrame)->Unit(benchmark::kMillisecond);

static void BM_NearestPoint(benchmark::State& state) {
  const sim::TrackWorld world = sim::presets::test_loop();
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(world.track().nearest({x, 0.7}, 1.0));
    x = x > 3.0 ? -3.0 : x + 0.01;
  }
}
BENCHMARK(BM_NearestPoint);

static void BM_OracleEpisode(benchmark::State& state) {
  const sim::TrackWorld world = sim::presets::oval();
  const sim::SimConfig cfg;
  sim::EpisodeOptions eo;
  eo.frames = 60;
  for (auto _ : state) {
    sim::OracleDriver driver(cfg.oracle);
    benchmark::DoNotOptimize(sim::run_episode(world, driver, cfg, eo));
  }
  state.SetItemsProcessed(state.iterations() * 60);
}
BENCHMARK(BM_OracleEpisode)->Unit(benchmark::kMillisecond);

static void BM_VisibilitySweep(benchmark::State& state) {
  const sim::TrackWorld base = sim::presets::test_loop();
  const sim::TrackWorld world = base.with_occluders(sim::block_curves(base, 0.4, 0.3));
  const sim::CameraModel camera = sim::CameraModel::standard();
  for (auto _ : state) benchmark::DoNotOptimize(sim::sweep_visibility(world, camera));
}
BENCHMARK(BM_VisibilitySweep)->Unit(benchmark::kMillisecond);
