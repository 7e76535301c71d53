// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "linetrace/nn/tensor.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::nn {

enum class Mode { Train, Eval };

enum class LayerKind : std::uint8_t {
  Dense = 0,
  Conv1D = 1,
  MaxPoolAxis0 = 2,
  Dropout = 3,
  BatchNorm = 4,
  Flatten = 5,
  Activation = 6,
};

/// Which per-sample axis a 1-D convolution slides along.
///   ChannelsFirst: input (C, L), slides along the second axis, output (F, L-k+1).
///   ChannelsLast:  input (L, C), slides along the first axis,  output (L-k+1, F).
enum class ConvOrientation : std::uint8_t { ChannelsFirst = 0, ChannelsLast = 1 };

enum class ActivationKind : std::uint8_t { Linear = 0, Relu = 1, Softsign = 2 };

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  std::size_t units = 0;  // dense units or conv filters
  std::size_t kernel = 0;
  ConvOrientation orientation = ConvOrientation::ChannelsFirst;
  std::size_t pool = 1;
  double rate = 0.0;
  double momentum = 0.99;
  double epsilon = 1e-3;
  ActivationKind activation = ActivationKind::Linear;

  static LayerSpec dense(std::size_t units);
  static LayerSpec conv1d(std::size_t filters, std::size_t kernel, ConvOrientation orientation);
  static LayerSpec maxpool_axis0(std::size_t pool);
  static LayerSpec dropout(double rate);
  static LayerSpec batchnorm(double momentum = 0.99, double epsilon = 1e-3);
  static LayerSpec flatten();
  static LayerSpec activation_of(ActivationKind kind);

  /// Throws std::invalid_argument for out-of-range settings.
  void validate() const;
  std::string describe() const;

  bool operator==(const LayerSpec&) const = default;
};

std::string kind_name(LayerKind kind);
std::string activation_name(ActivationKind kind);

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// One stage of a Network. Tensors carry a leading batch axis; shapes passed
/// to output_shape() are per-sample.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  virtual Shape output_shape(const Shape& input) const = 0;
  /// Caches whatever backward() needs.
  virtual Tensor forward(const Tensor& x, Mode mode, Rng& rng) = 0;
  /// Writes parameter gradients and returns the input gradient. Throws
  /// UsageError without a preceding forward().
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual std::vector<Param*> params() { return {}; }
  /// Non-trainable state that is still part of the model (running statistics).
  virtual std::vector<Tensor*> buffers() { return {}; }

  /// Batch normalization only: whether running statistics have seen a
  /// training batch (or were loaded from a model file).
  virtual bool running_stats_ready() const { return true; }
  virtual void set_running_stats_ready(bool) {}

  std::size_t parameter_count();
};

/// Builds a layer for the given per-sample input shape. Weights are drawn
/// glorot-uniform from init_rng, biases start at zero.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& init_rng);

// Stateless forms of the layer maths, also used directly by tests.

Tensor softsign(const Tensor& x);
Tensor relu(const Tensor& x);
/// Affine map on the last axis, shared across leading axes. W is (in, out).
Tensor dense_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// x is (N, A, B); W is (F, C*k) for ChannelsFirst, (k*C, F) for ChannelsLast.
Tensor conv1d_forward(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel,
                      ConvOrientation orientation);
/// x is (N, A, B); max over non-overlapping groups of `pool` along A.
Tensor maxpool_axis0(const Tensor& x, std::size_t pool);

}  // namespace linetrace::nn
