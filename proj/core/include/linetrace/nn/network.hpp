// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "linetrace/nn/layers.hpp"
#include "linetrace/nn/tensor.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::nn {

/// Ordered stack of layers with a fixed per-sample input shape.
///
/// Weights are initialized from `seed`; dropout masks come from a separate
/// stream derived from the same seed, so a fixed seed gives a bit-identical
/// training trajectory. The network output is checked for NaN/Inf.
class Network {
 public:
  Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed = 0);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  /// x has shape (N, input_shape...). Output is (N, output_shape...).
  Tensor forward(const Tensor& x);
  /// Fills every Param::grad and returns d(loss)/d(input).
  Tensor backward(const Tensor& grad_output);

  void set_mode(Mode mode) noexcept { mode_ = mode; }
  Mode mode() const noexcept { return mode_; }

  /// Restarts the dropout stream.
  void reseed_dropout(std::uint64_t seed);
  std::uint64_t seed() const noexcept { return seed_; }

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return shapes_.back(); }
  /// Per-sample output shape of each layer, in order.
  const std::vector<Shape>& layer_shapes() const noexcept { return shapes_; }
  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }

  std::vector<Param*> params();
  /// Trainable parameters plus running statistics.
  std::size_t parameter_count() const;

  /// Binary model file; see network.cpp for the layout.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Network load(std::istream& in, const std::string& source = "<stream>");
  static Network load(const std::filesystem::path& path);

 private:
  Shape input_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Shape> shapes_;
  std::uint64_t seed_;
  Rng dropout_rng_;
  Mode mode_ = Mode::Train;
  bool has_forward_ = false;
};

}  // namespace linetrace::nn
