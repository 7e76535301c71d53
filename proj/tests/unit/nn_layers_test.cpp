// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "linetrace/error.hpp"
#include "linetrace/nn/layers.hpp"
#include "linetrace/nn/optim.hpp"

using namespace linetrace;
using namespace linetrace::nn;

namespace {

std::unique_ptr<Layer> build(const LayerSpec& spec, const Shape& in, std::uint64_t seed = 0) {
  Rng rng(seed);
  return make_layer(spec, in, rng);
}

// Bias-corrected scalar Adam, written out independently of adam_step.
double scalar_adam(double theta, double g, int steps, double lr, double b1, double b2, double eps) {
  double m = 0.0, v = 0.0;
  for (int t = 1; t <= steps; ++t) {
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
  }
  return theta;
}

}  // namespace

TEST(Tensor, ShapeAndReshape) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(to_string(t.shape()), "(2,3)");
  t.reshape({3, 2});
  EXPECT_EQ(t.dim(0), 3u);
  EXPECT_THROW(t.reshape({4, 2}), ShapeError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_TRUE(t.all_finite());
  t[4] = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Tensor, LargeBuffersAreRecycled) {
  const double* first;
  {
    Tensor a({1 << 18});
    first = a.data();
  }
  Tensor b({1 << 18});
  EXPECT_EQ(b.data(), first);
  for (double x : b.values()) ASSERT_EQ(x, 0.0);
}

TEST(Dense, IdentityWeights) {
  auto layer = build(LayerSpec::dense(3), {3});
  Param& w = *layer->params()[0];
  w.value.fill(0.0);
  for (std::size_t i = 0; i < 3; ++i) w.value[i * 3 + i] = 1.0;
  Rng rng(0);
  const Tensor x({1, 3}, std::vector<double>{0.5, -2.0, 7.0});
  EXPECT_EQ(layer->forward(x, Mode::Eval, rng), x);
}

TEST(Dense, HandComputed) {
  // x = (1, 2); W maps 2 -> 3 as [[1, 0, 1], [0, 1, 1]]; b = (1, 1, 1).
  const Tensor x({1, 2}, std::vector<double>{1, 2});
  const Tensor w({2, 3}, std::vector<double>{1, 0, 1, 0, 1, 1});
  const Tensor b({3}, 1.0);
  EXPECT_EQ(dense_forward(x, w, b), Tensor({1, 3}, std::vector<double>{2, 3, 4}));
  EXPECT_THROW(dense_forward(Tensor({1, 3}), w, b), ShapeError);
}

TEST(Dense, SharedOverLeadingAxisAndCount) {
  auto layer = build(LayerSpec::dense(207), {102, 1022});
  EXPECT_EQ(layer->output_shape({102, 1022}), (Shape{102, 207}));
  EXPECT_EQ(layer->parameter_count(), 211761u);
}

TEST(Conv1D, TableShapesAndCounts) {
  auto first = build(LayerSpec::conv1d(307, 3, ConvOrientation::ChannelsFirst), {1, 1024});
  EXPECT_EQ(first->output_shape({1, 1024}), (Shape{307, 1022}));
  EXPECT_EQ(first->parameter_count(), 1228u);
  auto second = build(LayerSpec::conv1d(100, 1, ConvOrientation::ChannelsLast), {102, 207});
  EXPECT_EQ(second->output_shape({102, 207}), (Shape{102, 100}));
  EXPECT_EQ(second->parameter_count(), 20800u);
  EXPECT_THROW(build(LayerSpec::conv1d(2, 5, ConvOrientation::ChannelsFirst), {1, 4}), ShapeError);
}

TEST(Conv1D, HandComputedChannelsFirst) {
  // One channel, length 4, one filter [1, 2, 3], bias 0.5.
  const Tensor x({1, 1, 4}, std::vector<double>{1, 0, 2, -1});
  const Tensor w({1, 3}, std::vector<double>{1, 2, 3});
  const Tensor b({1}, 0.5);
  const Tensor y = conv1d_forward(x, w, b, 3, ConvOrientation::ChannelsFirst);
  EXPECT_EQ(y, Tensor({1, 1, 2}, std::vector<double>{7.5, 1.5}));
}

TEST(Conv1D, HandComputedChannelsLast) {
  // Length 3, two channels, kernel 2, one filter. W rows ordered (tap, channel).
  const Tensor x({1, 3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6});
  const Tensor w({4, 1}, std::vector<double>{1, 0, 0, 1});
  const Tensor b({1}, 0.0);
  const Tensor y = conv1d_forward(x, w, b, 2, ConvOrientation::ChannelsLast);
  EXPECT_EQ(y, Tensor({1, 2, 1}, std::vector<double>{1 + 4, 3 + 6}));
}

TEST(MaxPool, ReducesFirstAxis) {
  auto layer = build(LayerSpec::maxpool_axis0(3), {307, 1022});
  EXPECT_EQ(layer->output_shape({307, 1022}), (Shape{102, 1022}));

  Tensor x({1, 6, 2});
  for (std::size_t i = 0; i < 12; ++i) x[i] = double(i);
  EXPECT_EQ(maxpool_axis0(x, 2), Tensor({1, 3, 2}, std::vector<double>{2, 3, 6, 7, 10, 11}));
  EXPECT_EQ(maxpool_axis0(x, 1), x);
}

TEST(BatchNorm, StandardizedBatchPassesThrough) {
  auto layer = build(LayerSpec::batchnorm(), {2});
  const Tensor x({4, 2}, std::vector<double>{1, -1, -1, 1, 1, -1, -1, 1});
  Rng rng(0);
  const Tensor y = layer->forward(x, Mode::Train, rng);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i] / std::sqrt(1.0 + 1e-3), 1e-12);
}

TEST(BatchNorm, ParameterCountIncludesRunningStatistics) {
  auto layer = build(LayerSpec::batchnorm(), {200});
  EXPECT_EQ(layer->parameter_count(), 800u);
}

TEST(BatchNorm, RunningStatisticsUpdate) {
  auto layer = build(LayerSpec::batchnorm(0.5, 1e-3), {1});
  Rng rng(0);
  EXPECT_FALSE(layer->running_stats_ready());
  layer->forward(Tensor({2, 1}, std::vector<double>{1.0, 3.0}), Mode::Train, rng);
  EXPECT_TRUE(layer->running_stats_ready());
  EXPECT_DOUBLE_EQ((*layer->buffers()[0])[0], 1.0);        // 0.5 * 0 + 0.5 * 2
  EXPECT_DOUBLE_EQ((*layer->buffers()[1])[0], 0.5 + 0.5);  // 0.5 * 1 + 0.5 * 1
}

TEST(Dropout, EvalAndZeroRateAreIdentity) {
  Rng rng(1);
  const Tensor x = linetrace::testing::random_tensor({3, 4}, rng);
  auto layer = build(LayerSpec::dropout(0.5), {4});
  EXPECT_EQ(layer->forward(x, Mode::Eval, rng), x);
  const Tensor g = linetrace::testing::random_tensor({3, 4}, rng);
  EXPECT_EQ(layer->backward(g), g);
  auto none = build(LayerSpec::dropout(0.0), {4});
  EXPECT_EQ(none->forward(x, Mode::Train, rng), x);
}

TEST(Dropout, SurvivorFractionAndMean) {
  auto layer = build(LayerSpec::dropout(0.2), {100000});
  Rng rng(42);
  const Tensor y = layer->forward(Tensor({1, 100000}, 1.0), Mode::Train, rng);
  std::size_t survivors = 0;
  double sum = 0.0;
  for (double v : y.values()) {
    if (v != 0.0) {
      ++survivors;
      EXPECT_DOUBLE_EQ(v, 1.25);
    }
    sum += v;
  }
  EXPECT_NEAR(double(survivors) / 1e5, 0.8, 0.01);
  EXPECT_NEAR(sum / 1e5, 1.0, 0.02);
}

TEST(Activation, Softsign) {
  const Tensor y = softsign(Tensor({1, 3}, std::vector<double>{1.0, -3.0, 0.0}));
  EXPECT_EQ(y, Tensor({1, 3}, std::vector<double>{0.5, -0.75, 0.0}));
  const Tensor r = relu(Tensor({1, 2}, std::vector<double>{-1.0, 2.0}));
  EXPECT_EQ(r, Tensor({1, 2}, std::vector<double>{0.0, 2.0}));
}

TEST(Layer, BackwardWithoutForwardThrows) {
  for (const LayerSpec& spec : {LayerSpec::dense(2), LayerSpec::dropout(0.1), LayerSpec::batchnorm(),
                                LayerSpec::flatten(), LayerSpec::activation_of(ActivationKind::Softsign)}) {
    auto layer = build(spec, {3, 2});
    EXPECT_THROW(layer->backward(Tensor(Shape{1, 3, 2})), UsageError) << spec.describe();
  }
}

TEST(LayerSpec, Validation) {
  EXPECT_THROW(LayerSpec::dropout(1.0).validate(), std::invalid_argument);
  EXPECT_THROW(LayerSpec::dense(0).validate(), std::invalid_argument);
  EXPECT_THROW(LayerSpec::maxpool_axis0(0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(LayerSpec::conv1d(3, 1, ConvOrientation::ChannelsLast).validate());
}

TEST(MseLoss, Examples) {
  EXPECT_DOUBLE_EQ(mse_loss(Tensor({2, 2}, 0.3), Tensor({2, 2}, 0.3)).loss, 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(Tensor({2, 2}, 1.0), Tensor({2, 2}, 0.0)).loss, 1.0);
  const LossResult r =
      mse_loss(Tensor({1, 2}, std::vector<double>{1, 0}), Tensor({1, 2}, std::vector<double>{0, 1}));
  EXPECT_DOUBLE_EQ(r.loss, 1.0);
  EXPECT_EQ(r.grad, Tensor({1, 2}, std::vector<double>{1, -1}));
  EXPECT_THROW(mse_loss(Tensor({1, 2}), Tensor({2, 1})), ShapeError);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Param p{"w", Tensor({3}, std::vector<double>{1, 2, 3}), Tensor({3})};
  AdamState state;
  Param* ps[] = {&p};
  adam_step(ps, state);
  EXPECT_EQ(p.value, Tensor({3}, std::vector<double>{1, 2, 3}));
}

TEST(Adam, FirstStepHandValue) {
  Param p{"w", Tensor({1}, 0.0), Tensor({1}, 1.0)};
  AdamState state;
  Param* ps[] = {&p};
  adam_step(ps, state);
  EXPECT_NEAR(p.value[0], -1e-4 / (1.0 + 1e-7), 1e-18);
}

TEST(Adam, ThreeStepsMatchScalarOracle) {
  for (double g : {1.0, -0.37, 2.5e-3}) {
    Param p{"w", Tensor({1}, 0.25), Tensor({1}, g)};
    AdamState state;
    state.config.learning_rate = 1e-2;
    Param* ps[] = {&p};
    for (int i = 0; i < 3; ++i) adam_step(ps, state);
    EXPECT_NEAR(p.value[0], scalar_adam(0.25, g, 3, 1e-2, 0.9, 0.999, 1e-7), 1e-12);
  }
}

TEST(Adam, NonFiniteGradientRejected) {
  Param p{"w", Tensor({2}, 1.0), Tensor({2}, std::vector<double>{0.1, INFINITY})};
  AdamState state;
  Param* ps[] = {&p};
  EXPECT_THROW(adam_step(ps, state), NonFiniteError);
  EXPECT_EQ(p.value, Tensor({2}, 1.0));
}
