// SPDX-License-Identifier: Apache-2.0
#include "linetrace/models/training.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "linetrace/error.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::models {

namespace {
constexpr std::size_t kPredictChunk = 128;

struct ModeGuard {
  nn::Network& net;
  nn::Mode saved;
  ModeGuard(nn::Network& n, nn::Mode mode) : net(n), saved(n.mode()) { net.set_mode(mode); }
  ~ModeGuard() { net.set_mode(saved); }
};

std::string fmt(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}
}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (!(accuracy_delta > 0.0)) throw std::invalid_argument("accuracy delta must be > 0");
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const EpochRecord& e : epochs) {
    out += std::to_string(e.epoch) + "," + fmt(e.train_loss) + "," + fmt(e.val_loss) + "\n";
  }
  return out;
}

void TrainHistory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv();
}

nn::Tensor to_batch(std::span<const dataset::DemoRecord> records) {
  nn::Tensor x({records.size(), 1, imaging::kInputSize});
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::copy(records[i].input.begin(), records[i].input.end(), x.data() + i * imaging::kInputSize);
  }
  return x;
}

nn::Tensor to_targets(std::span<const dataset::DemoRecord> records) {
  nn::Tensor y({records.size(), 1, 2});
  for (std::size_t i = 0; i < records.size(); ++i) {
    y[2 * i] = records[i].linear;
    y[2 * i + 1] = records[i].angular;
  }
  return y;
}

std::vector<Velocity2> predict(nn::Network& net, std::span<const imaging::InputVector> inputs) {
  ModeGuard guard(net, nn::Mode::Eval);
  std::vector<Velocity2> out;
  out.reserve(inputs.size());
  for (std::size_t start = 0; start < inputs.size(); start += kPredictChunk) {
    const std::size_t n = std::min(kPredictChunk, inputs.size() - start);
    nn::Tensor x({n, 1, imaging::kInputSize});
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(inputs[start + i].begin(), inputs[start + i].end(), x.data() + i * imaging::kInputSize);
    }
    const nn::Tensor y = net.forward(x);
    for (std::size_t i = 0; i < n; ++i) out.push_back({y[2 * i], y[2 * i + 1]});
  }
  return out;
}

Velocity2 predict_one(nn::Network& net, const imaging::InputVector& input) {
  return predict(net, std::span<const imaging::InputVector>(&input, 1)).front();
}

MetricReport compute_metrics(std::span<const Velocity2> predictions, std::span<const Velocity2> targets,
                             double delta) {
  if (predictions.size() != targets.size()) throw std::invalid_argument("prediction/target count mismatch");
  if (predictions.empty()) throw std::invalid_argument("metrics of an empty set");
  MetricReport r;
  r.samples = predictions.size();
  double abs_err[2] = {0, 0}, sq_err[2] = {0, 0};
  std::size_t within = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool ok = true;
    for (int c = 0; c < 2; ++c) {
      const double d = predictions[i][c] - targets[i][c];
      abs_err[c] += std::abs(d);
      sq_err[c] += d * d;
      ok = ok && std::abs(d) <= delta;
    }
    if (ok) ++within;
  }
  const double n = double(r.samples);
  r.accuracy = double(within) / n;
  r.loss = (sq_err[0] + sq_err[1]) / (2.0 * n);
  r.mae_linear = abs_err[0] / n;
  r.mae_angular = abs_err[1] / n;
  r.rmse_linear = std::sqrt(sq_err[0] / n);
  r.rmse_angular = std::sqrt(sq_err[1] / n);
  return r;
}

MetricReport evaluate(nn::Network& net, const dataset::DemoSet& set, double delta) {
  if (set.empty()) throw std::invalid_argument("evaluate: empty set");
  std::vector<imaging::InputVector> inputs;
  std::vector<Velocity2> targets;
  inputs.reserve(set.size());
  targets.reserve(set.size());
  for (const auto& r : set.records) {
    inputs.push_back(r.input);
    targets.push_back({r.linear, r.angular});
  }
  const auto preds = predict(net, inputs);
  return compute_metrics(preds, targets, delta);
}

TrainHistory train(nn::Network& net, const dataset::DemoSet& train_set, const dataset::DemoSet& val_set,
                   const TrainConfig& config, const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");

  nn::AdamState adam;
  adam.config.learning_rate = config.learning_rate;
  net.reseed_dropout(config.seed);
  Rng shuffle_rng(mix64(config.seed ^ 0x5eedULL));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<dataset::DemoRecord> batch;
  const std::vector<nn::Param*> params = net.params();

  TrainHistory history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    net.set_mode(nn::Mode::Train);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += config.batch_size, ++batch_index) {
      const std::size_t n = std::min(config.batch_size, order.size() - pos);
      batch.clear();
      for (std::size_t i = 0; i < n; ++i) batch.push_back(train_set.records[order[pos + i]]);
      try {
        const nn::Tensor pred = net.forward(to_batch(batch));
        const nn::LossResult loss = nn::mse_loss(pred, to_targets(batch));
        net.backward(loss.grad);
        nn::adam_step(params, adam);
        loss_sum += loss.loss * double(n);
      } catch (const NonFiniteError& e) {
        net.set_mode(nn::Mode::Eval);
        throw NonFiniteError("training aborted at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index) + ": " + e.what());
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / double(order.size());
    rec.val_loss = evaluate(net, val_set, config.accuracy_delta).loss;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  net.set_mode(nn::Mode::Eval);
  return history;
}

}  // namespace linetrace::models
