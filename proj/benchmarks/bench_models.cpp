// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "linetrace/models/architectures.hpp"
#include "linetrace/models/training.hpp"
#include "linetrace/nn/optim.hpp"
#include "linetrace/util/rng.hpp"

using namespace linetrace;

namespace {

nn::Tensor random_batch(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  nn::Tensor x({n, 1, 1024});
  for (double& v : x.values()) v = rng.uniform() < 0.1 ? 1.0 : 0.0;
  return x;
}

}  // namespace

// Single-frame inference, as in the closed loop.
static void BM_Predict(benchmark::State& state) {
  nn::Network net = models::build(static_cast<models::Architecture>(state.range(0)), 1);
  net.set_mode(nn::Mode::Eval);
  const nn::Tensor x = random_batch(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetLabel(models::architecture_name(static_cast<models::Architecture>(state.range(0))));
}
BENCHMARK(BM_Predict)
    ->Arg(static_cast<int>(models::Architecture::Mlp))
    ->Arg(static_cast<int>(models::Architecture::Cnn1d))
    ->Unit(benchmark::kMillisecond);

// Forward, MSE, backward and one Adam update on a mini-batch.
static void BM_TrainStep(benchmark::State& state) {
  const auto arch = static_cast<models::Architecture>(state.range(0));
  const auto batch = static_cast<std::size_t>(state.range(1));
  nn::Network net = models::build(arch, 1);
  net.set_mode(nn::Mode::Train);
  const nn::Tensor x = random_batch(batch, 3);
  nn::Tensor y({batch, 1, 2}, 0.5);
  nn::AdamState adam;
  std::vector<nn::Param*> params = net.params();
  for (auto _ : state) {
    const nn::Tensor out = net.forward(x);
    const nn::LossResult loss = nn::mse_loss(out, y);
    net.backward(loss.grad);
    nn::adam_step(params, adam);
    benchmark::DoNotOptimize(loss.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(models::architecture_name(arch));
}
BENCHMARK(BM_TrainStep)
    ->Args({static_cast<int>(models::Architecture::Mlp), 64})
    ->Args({static_cast<int>(models::Architecture::Cnn1d), 8})
    ->Args({static_cast<int>(models::Architecture::Cnn1d), 64})
    ->Unit(benchmark::kMillisecond);
