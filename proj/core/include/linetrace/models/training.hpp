// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "linetrace/dataset/demo.hpp"
#include "linetrace/nn/network.hpp"
#include "linetrace/nn/optim.hpp"

namespace linetrace::models {

struct TrainConfig {
  int epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  double learning_rate = 1e-4;
  /// Per-component tolerance for the accuracy metric.
  double accuracy_delta = 0.1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  /// `epoch,train_loss,val_loss` (wall-clock is left out so the file is reproducible).
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Regression metrics on one split. Accuracy is the fraction of samples with
/// both components within delta of the target.
struct MetricReport {
  std::size_t samples = 0;
  double accuracy = 0.0;
  double loss = 0.0;
  double mae_linear = 0.0;
  double mae_angular = 0.0;
  double rmse_linear = 0.0;
  double rmse_angular = 0.0;
};

using Velocity2 = std::array<double, 2>;  // {linear, angular}

nn::Tensor to_batch(std::span<const dataset::DemoRecord> records);
nn::Tensor to_targets(std::span<const dataset::DemoRecord> records);

/// Eval-mode predictions, processed in chunks. Restores the previous mode.
std::vector<Velocity2> predict(nn::Network& net, std::span<const imaging::InputVector> inputs);
Velocity2 predict_one(nn::Network& net, const imaging::InputVector& input);

MetricReport compute_metrics(std::span<const Velocity2> predictions, std::span<const Velocity2> targets,
                             double delta);
MetricReport evaluate(nn::Network& net, const dataset::DemoSet& set, double delta = 0.1);

/// Mini-batch Adam on MSE with a seeded per-epoch shuffle. Validation loss is
/// computed in eval mode. The network is left in eval mode. Throws
/// NonFiniteError naming the epoch and batch if training diverges.
TrainHistory train(nn::Network& net, const dataset::DemoSet& train_set, const dataset::DemoSet& val_set,
                   const TrainConfig& config,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace linetrace::models
