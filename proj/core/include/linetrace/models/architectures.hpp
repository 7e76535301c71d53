// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "linetrace/nn/network.hpp"

namespace linetrace::models {

enum class Architecture { Mlp, Cnn1d };

std::string architecture_name(Architecture arch);
Architecture parse_architecture(const std::string& name);

/// Widths of the fully connected regressor. Defaults are the published sizes.
struct MlpDims {
  std::size_t input = 1024;
  std::size_t hidden1 = 300;
  std::size_t hidden2 = 200;
  std::size_t hidden3 = 200;
  double dropout1 = 0.2;
  double dropout2 = 0.1;
};

/// Widths of the 1-D convolutional regressor. Defaults are the published sizes.
struct CnnDims {
  std::size_t input = 1024;
  std::size_t conv1_filters = 307;
  std::size_t conv1_kernel = 3;
  std::size_t pool = 3;
  std::size_t dense1 = 207;
  std::size_t conv2_filters = 100;
  std::size_t conv2_kernel = 1;
  std::size_t dense2 = 100;
  double dropout1 = 0.2;
  double dropout2 = 0.1;
  double dropout3 = 0.2;
  double dropout4 = 0.2;
  /// Activation after the two interior dense layers.
  nn::ActivationKind interior_activation = nn::ActivationKind::Softsign;
};

/// Input(1, 1024) -> Dense 300 relu -> Dropout .2 -> Dense 200 relu -> BatchNorm
/// -> Dropout .1 -> Dense 200 relu -> Dense 2.
std::vector<nn::LayerSpec> mlp_layers(const MlpDims& dims = {});

/// Conv1D(307, k3, channels-first) softsign -> Dropout .2 -> MaxPool axis 0 (3)
/// -> Dense 207 softsign -> BatchNorm -> Dropout .1 -> Conv1D(100, k1, channels-last)
/// softsign -> Dense 100 softsign -> BatchNorm -> Dropout .2 -> Dropout .2 -> Flatten
/// -> Dense 2.
std::vector<nn::LayerSpec> cnn1d_layers(const CnnDims& dims = {});

nn::Network build_mlp(std::uint64_t seed = 0, const MlpDims& dims = {});
nn::Network build_cnn1d(std::uint64_t seed = 0, const CnnDims& dims = {});
nn::Network build(Architecture arch, std::uint64_t seed = 0);

/// One row of the architecture table: layer name and per-sample output shape.
/// Activation layers are folded into the preceding row.
struct TableRow {
  std::string layer;
  nn::Shape output;
};
std::vector<TableRow> architecture_table(const nn::Network& net);

struct ParamComparison {
  std::size_t cnn1d = 0;
  std::size_t mlp = 0;
  /// 1 - cnn1d / mlp.
  double reduction = 0.0;
};
ParamComparison compare_param_counts();

}  // namespace linetrace::models
