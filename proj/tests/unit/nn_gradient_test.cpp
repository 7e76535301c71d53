// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>

#include "gradcheck.hpp"
#include "linetrace/models/architectures.hpp"

using namespace linetrace;
using namespace linetrace::nn;
using linetrace::testing::check_layer;
using linetrace::testing::check_network;

namespace {

constexpr double kTolerance = 1e-4;

void expect_ok(const linetrace::testing::GradCheck& r) {
  EXPECT_GT(r.checked, 0u);
  EXPECT_LT(r.max_rel_error, kTolerance) << r.worst;
}

}  // namespace

TEST(GradientCheck, Dense) { expect_ok(check_layer(LayerSpec::dense(5), {3, 7}, 4, 1)); }

TEST(GradientCheck, DenseRankOneSamples) { expect_ok(check_layer(LayerSpec::dense(3), {6}, 5, 2)); }

TEST(GradientCheck, Conv1DChannelsFirst) {
  expect_ok(check_layer(LayerSpec::conv1d(4, 3, ConvOrientation::ChannelsFirst), {2, 9}, 3, 3));
}

TEST(GradientCheck, Conv1DChannelsLast) {
  expect_ok(check_layer(LayerSpec::conv1d(4, 2, ConvOrientation::ChannelsLast), {7, 3}, 3, 4));
  expect_ok(check_layer(LayerSpec::conv1d(3, 1, ConvOrientation::ChannelsLast), {5, 4}, 2, 5));
}

TEST(GradientCheck, MaxPoolAxis0) {
  // Distinct values spaced well beyond the probe step, so no group has a
  // near-tie that the perturbation could flip.
  const Shape per{7, 4};
  auto make = [&](Rng& rng) {
    Tensor x({3, 7, 4});
    std::vector<double> v(x.size());
    std::iota(v.begin(), v.end(), 0.0);
    rng.shuffle(std::span<double>(v));
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = 0.01 * v[i];
    return x;
  };
  expect_ok(check_layer(LayerSpec::maxpool_axis0(3), per, 3, 6, make));
}

TEST(GradientCheck, Dropout) { expect_ok(check_layer(LayerSpec::dropout(0.3), {4, 5}, 3, 7)); }

TEST(GradientCheck, BatchNorm) {
  expect_ok(check_layer(LayerSpec::batchnorm(), {6}, 8, 8));
  expect_ok(check_layer(LayerSpec::batchnorm(0.9, 1e-3), {3, 4}, 5, 9));
}

TEST(GradientCheck, Flatten) { expect_ok(check_layer(LayerSpec::flatten(), {3, 4}, 2, 10)); }

TEST(GradientCheck, Softsign) {
  expect_ok(check_layer(LayerSpec::activation_of(ActivationKind::Softsign), {3, 5}, 2, 11));
}

TEST(GradientCheck, Relu) {
  // Keep inputs away from the kink at zero.
  auto make = [](Rng& rng) {
    Tensor x({2, 3, 5});
    for (double& v : x.values()) v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.01, 1.0);
    return x;
  };
  expect_ok(check_layer(LayerSpec::activation_of(ActivationKind::Relu), {3, 5}, 2, 12, make));
}

TEST(GradientCheck, ReducedMlp) {
  models::MlpDims dims;
  dims.input = 24;
  dims.hidden1 = 9;
  dims.hidden2 = 7;
  dims.hidden3 = 6;
  Network net = models::build_mlp(13, dims);
  // Relu kinks: a probe that crosses zero would show up as a large error.
  expect_ok(check_network(net, 6, 14));
}

TEST(GradientCheck, ReducedCnn) {
  models::CnnDims dims;
  dims.input = 20;
  dims.conv1_filters = 6;
  dims.dense1 = 5;
  dims.conv2_filters = 4;
  dims.dense2 = 3;
  Network net = models::build_cnn1d(15, dims);
  EXPECT_EQ(net.output_shape(), (Shape{1, 2}));
  expect_ok(check_network(net, 4, 16));
}

TEST(GradientCheck, DenseMatchesClosedForm) {
  Rng rng(20);
  auto layer = make_layer(LayerSpec::dense(3), {4}, rng);
  const Tensor x = linetrace::testing::random_tensor({5, 4}, rng);
  const Tensor delta = linetrace::testing::random_tensor({5, 3}, rng);
  layer->forward(x, Mode::Train, rng);
  layer->backward(delta);
  const Param& w = *layer->params()[0];
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double expected = 0.0;
      for (std::size_t n = 0; n < 5; ++n) expected += x[n * 4 + i] * delta[n * 3 + j];
      EXPECT_NEAR(w.grad[i * 3 + j], expected, 1e-14);
    }
  }
}
