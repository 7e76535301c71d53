// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "linetrace/nn/layers.hpp"
#include "linetrace/nn/tensor.hpp"

namespace linetrace::nn {

struct LossResult {
  double loss = 0.0;
  Tensor grad;
};

/// Mean over every element of (pred - target)^2; gradient 2 (pred - target) / count.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t t = 0;
};

/// One bias-corrected Adam update. Moments are allocated lazily on the first
/// step. Throws NonFiniteError (leaving parameters untouched) when any
/// gradient holds NaN/Inf.
void adam_step(std::span<Param* const> params, AdamState& state);

}  // namespace linetrace::nn
