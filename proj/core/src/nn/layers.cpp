// SPDX-License-Identifier: Apache-2.0
#include "linetrace/nn/layers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "linetrace/error.hpp"

namespace linetrace::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::RowVectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::RowVectorXd>;

MatMap as_matrix(Tensor& t, std::size_t rows, std::size_t cols) {
  return MatMap(t.data(), Eigen::Index(rows), Eigen::Index(cols));
}
ConstMatMap as_matrix(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatMap(t.data(), Eigen::Index(rows), Eigen::Index(cols));
}

Shape with_batch(std::size_t n, const Shape& per_sample) {
  Shape s{n};
  s.insert(s.end(), per_sample.begin(), per_sample.end());
  return s;
}

Shape per_sample(const Tensor& x) { return Shape(x.shape().begin() + 1, x.shape().end()); }

void require_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank) {
    throw ShapeError(std::string(what) + " expects a rank-" + std::to_string(rank) +
                     " per-sample input, got " + to_string(s));
  }
}

void require_batch(const Tensor& x, const char* what) {
  if (x.rank() < 2) throw ShapeError(std::string(what) + ": tensor needs a batch axis, got " + to_string(x.shape()));
}

[[noreturn]] void no_forward(const char* what) {
  throw UsageError(std::string(what) + ": backward() called without a stored forward pass");
}

void glorot_init(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
  for (double& x : w.values()) x = rng.uniform(-limit, limit);
}

// ---------------------------------------------------------------------------

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t in, std::size_t units, Rng& rng)
      : in_(in), units_(units), w_{"weight", Tensor({in, units}), Tensor({in, units})},
        b_{"bias", Tensor({units}), Tensor({units})} {
    glorot_init(w_.value, in, units, rng);
  }

  LayerSpec spec() const override { return LayerSpec::dense(units_); }

  Shape output_shape(const Shape& input) const override {
    if (input.empty() || input.back() != in_) {
      throw ShapeError("dense: input " + to_string(input) + " does not end in " + std::to_string(in_));
    }
    Shape out = input;
    out.back() = units_;
    return out;
  }

  Tensor forward(const Tensor& x, Mode, Rng&) override {
    Tensor y = dense_forward(x, w_.value, b_.value);
    input_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("dense");
    const std::size_t rows = input_.size() / in_;
    auto x = as_matrix(input_, rows, in_);
    auto gm = as_matrix(g, rows, units_);
    as_matrix(w_.grad, in_, units_).noalias() = x.transpose() * gm;
    VecMap(b_.grad.data(), Eigen::Index(units_)) = gm.colwise().sum();
    Tensor dx(input_.shape());
    as_matrix(dx, rows, in_).noalias() = gm * as_matrix(w_.value, in_, units_).transpose();
    has_cache_ = false;
    input_ = Tensor();
    return dx;
  }

  std::vector<Param*> params() override { return {&w_, &b_}; }

 private:
  std::size_t in_, units_;
  Param w_, b_;
  Tensor input_;
  bool has_cache_ = false;
};

// ---------------------------------------------------------------------------

class Conv1DLayer final : public Layer {
 public:
  Conv1DLayer(const Shape& input, std::size_t filters, std::size_t kernel, ConvOrientation orientation,
              Rng& rng)
      : filters_(filters), kernel_(kernel), orientation_(orientation) {
    require_rank(input, 2, "conv1d");
    channels_ = orientation == ConvOrientation::ChannelsFirst ? input[0] : input[1];
    length_ = orientation == ConvOrientation::ChannelsFirst ? input[1] : input[0];
    if (kernel_ > length_) {
      throw ShapeError("conv1d: kernel " + std::to_string(kernel_) + " exceeds convolved extent " +
                       std::to_string(length_) + " of input " + to_string(input));
    }
    const Shape wshape = orientation == ConvOrientation::ChannelsFirst ? Shape{filters, channels_ * kernel}
                                                                        : Shape{kernel * channels_, filters};
    w_ = {"weight", Tensor(wshape), Tensor(wshape)};
    b_ = {"bias", Tensor({filters}), Tensor({filters})};
    glorot_init(w_.value, channels_ * kernel, filters * kernel, rng);
  }

  LayerSpec spec() const override { return LayerSpec::conv1d(filters_, kernel_, orientation_); }

  Shape output_shape(const Shape& input) const override {
    require_rank(input, 2, "conv1d");
    const std::size_t c = orientation_ == ConvOrientation::ChannelsFirst ? input[0] : input[1];
    const std::size_t l = orientation_ == ConvOrientation::ChannelsFirst ? input[1] : input[0];
    if (c != channels_ || l != length_) {
      throw ShapeError("conv1d: input " + to_string(input) + " does not match the built layer");
    }
    const std::size_t out_len = length_ - kernel_ + 1;
    return orientation_ == ConvOrientation::ChannelsFirst ? Shape{filters_, out_len} : Shape{out_len, filters_};
  }

  Tensor forward(const Tensor& x, Mode, Rng&) override {
    require_batch(x, "conv1d");
    output_shape(per_sample(x));
    Tensor y = conv1d_forward(x, w_.value, b_.value, kernel_, orientation_);
    input_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("conv1d");
    const std::size_t n = input_.dim(0);
    const std::size_t out_len = length_ - kernel_ + 1;
    const std::size_t ck = channels_ * kernel_;
    Tensor dx(input_.shape());
    w_.grad.fill(0.0);
    b_.grad.fill(0.0);
    auto dw = as_matrix(w_.grad, w_.value.dim(0), w_.value.dim(1));
    auto db = VecMap(b_.grad.data(), Eigen::Index(filters_));
    auto w = as_matrix(w_.value, w_.value.dim(0), w_.value.dim(1));
    const std::size_t sample = channels_ * length_;

    if (orientation_ == ConvOrientation::ChannelsFirst) {
      RowMat cols(ck, out_len);
      for (std::size_t s = 0; s < n; ++s) {
        const double* xs = input_.data() + s * sample;
        for (std::size_t c = 0; c < channels_; ++c)
          for (std::size_t j = 0; j < kernel_; ++j)
            for (std::size_t t = 0; t < out_len; ++t) cols(c * kernel_ + j, t) = xs[c * length_ + t + j];
        ConstMatMap gs(g.data() + s * filters_ * out_len, Eigen::Index(filters_), Eigen::Index(out_len));
        dw.noalias() += gs * cols.transpose();
        db += gs.rowwise().sum().transpose();
        RowMat dcols = w.transpose() * gs;
        double* dxs = dx.data() + s * sample;
        for (std::size_t c = 0; c < channels_; ++c)
          for (std::size_t j = 0; j < kernel_; ++j)
            for (std::size_t t = 0; t < out_len; ++t) dxs[c * length_ + t + j] += dcols(c * kernel_ + j, t);
      }
    } else {
      const std::size_t rows = n * out_len;
      RowMat cols(rows, ck);
      for (std::size_t s = 0; s < n; ++s) {
        const double* xs = input_.data() + s * sample;
        for (std::size_t t = 0; t < out_len; ++t)
          for (std::size_t j = 0; j < kernel_; ++j)
            for (std::size_t c = 0; c < channels_; ++c)
              cols(s * out_len + t, j * channels_ + c) = xs[(t + j) * channels_ + c];
      }
      auto gm = as_matrix(g, rows, filters_);
      dw.noalias() = cols.transpose() * gm;
      db = gm.colwise().sum();
      RowMat dcols = gm * w.transpose();
      for (std::size_t s = 0; s < n; ++s) {
        double* dxs = dx.data() + s * sample;
        for (std::size_t t = 0; t < out_len; ++t)
          for (std::size_t j = 0; j < kernel_; ++j)
            for (std::size_t c = 0; c < channels_; ++c)
              dxs[(t + j) * channels_ + c] += dcols(s * out_len + t, j * channels_ + c);
      }
    }
    has_cache_ = false;
    input_ = Tensor();
    return dx;
  }

  std::vector<Param*> params() override { return {&w_, &b_}; }

 private:
  std::size_t filters_, kernel_;
  ConvOrientation orientation_;
  std::size_t channels_ = 0, length_ = 0;
  Param w_, b_;
  Tensor input_;
  bool has_cache_ = false;
};

// ---------------------------------------------------------------------------

class MaxPoolLayer final : public Layer {
 public:
  explicit MaxPoolLayer(std::size_t pool) : pool_(pool) {}

  LayerSpec spec() const override { return LayerSpec::maxpool_axis0(pool_); }

  Shape output_shape(const Shape& input) const override {
    require_rank(input, 2, "maxpool_axis0");
    if (input[0] < pool_) throw ShapeError("maxpool_axis0: pool larger than axis in " + to_string(input));
    return {input[0] / pool_, input[1]};
  }

  Tensor forward(const Tensor& x, Mode, Rng&) override {
    require_batch(x, "maxpool_axis0");
    const Shape out = output_shape(per_sample(x));
    const std::size_t n = x.dim(0), a = x.dim(1), b = x.dim(2);
    Tensor y(with_batch(n, out));
    argmax_.assign(y.size(), 0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t r = 0; r < out[0]; ++r) {
        for (std::size_t c = 0; c < b; ++c) {
          std::size_t best = s * a * b + (r * pool_) * b + c;
          for (std::size_t k = 1; k < pool_; ++k) {
            const std::size_t idx = s * a * b + (r * pool_ + k) * b + c;
            if (x[idx] > x[best]) best = idx;
          }
          const std::size_t o = (s * out[0] + r) * b + c;
          y[o] = x[best];
          argmax_[o] = best;
        }
      }
    }
    input_shape_ = x.shape();
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("maxpool_axis0");
    Tensor dx(input_shape_);
    for (std::size_t o = 0; o < g.size(); ++o) dx[argmax_[o]] += g[o];
    has_cache_ = false;
    return dx;
  }

 private:
  std::size_t pool_;
  std::vector<std::size_t> argmax_;
  Shape input_shape_;
  bool has_cache_ = false;
};

// ---------------------------------------------------------------------------

class DropoutLayer final : public Layer {
 public:
  explicit DropoutLayer(double rate) : rate_(rate) {}

  LayerSpec spec() const override { return LayerSpec::dropout(rate_); }
  Shape output_shape(const Shape& input) const override { return input; }

  Tensor forward(const Tensor& x, Mode mode, Rng& rng) override {
    has_cache_ = true;
    if (mode == Mode::Eval || rate_ == 0.0) {
      passthrough_ = true;
      return x;
    }
    passthrough_ = false;
    const double keep_scale = 1.0 / (1.0 - rate_);
    keep_.resize(x.size());
    Tensor y = x;
    // One draw from the shared stream seeds a counter-based mask.
    const std::uint64_t base = rng.next();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = static_cast<double>(mix64(base + i) >> 11) * 0x1.0p-53;
      keep_[i] = !(u < rate_);
      y[i] *= keep_[i] * keep_scale;
    }
    return y;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("dropout");
    has_cache_ = false;
    if (passthrough_) return g;
    const double keep_scale = 1.0 / (1.0 - rate_);
    Tensor dx(g.shape());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * (keep_[i] * keep_scale);
    return dx;
  }

 private:
  double rate_;
  std::vector<std::uint8_t> keep_;
  bool passthrough_ = true;
  bool has_cache_ = false;
};

// ---------------------------------------------------------------------------

class BatchNormLayer final : public Layer {
 public:
  BatchNormLayer(std::size_t features, double momentum, double epsilon)
      : features_(features), momentum_(momentum), epsilon_(epsilon),
        gamma_{"gamma", Tensor({features}, 1.0), Tensor({features})},
        beta_{"beta", Tensor({features}), Tensor({features})},
        running_mean_({features}, 0.0), running_var_({features}, 1.0) {}

  LayerSpec spec() const override { return LayerSpec::batchnorm(momentum_, epsilon_); }

  Shape output_shape(const Shape& input) const override {
    if (input.empty() || input.back() != features_) {
      throw ShapeError("batchnorm: input " + to_string(input) + " does not end in " + std::to_string(features_));
    }
    return input;
  }

  Tensor forward(const Tensor& x, Mode mode, Rng&) override {
    require_batch(x, "batchnorm");
    output_shape(per_sample(x));
    const std::size_t rows = x.size() / features_;
    auto xm = as_matrix(x, rows, features_);
    Eigen::RowVectorXd mean, var;
    if (mode == Mode::Train) {
      mean = xm.colwise().mean();
      var = (xm.rowwise() - mean).array().square().colwise().mean();
      auto rm = VecMap(running_mean_.data(), Eigen::Index(features_));
      auto rv = VecMap(running_var_.data(), Eigen::Index(features_));
      rm = momentum_ * rm + (1.0 - momentum_) * mean;
      rv = momentum_ * rv + (1.0 - momentum_) * var;
      stats_updated_ = true;
    } else {
      if (!stats_updated_ && !warned_) {
        std::cerr << "warning: batchnorm evaluated before any training update; using initial statistics\n";
        warned_ = true;
      }
      mean = ConstVecMap(running_mean_.data(), Eigen::Index(features_));
      var = ConstVecMap(running_var_.data(), Eigen::Index(features_));
    }
    inv_std_ = (var.array() + epsilon_).rsqrt().matrix();
    xhat_ = Tensor(x.shape());
    auto xh = as_matrix(xhat_, rows, features_);
    xh = ((xm.rowwise() - mean).array().rowwise() * inv_std_.array()).matrix();
    Tensor y(x.shape());
    auto ym = as_matrix(y, rows, features_);
    const ConstVecMap gamma(gamma_.value.data(), Eigen::Index(features_));
    const ConstVecMap beta(beta_.value.data(), Eigen::Index(features_));
    ym = (xh.array().rowwise() * gamma.array()).matrix().rowwise() + beta;
    train_cache_ = mode == Mode::Train;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("batchnorm");
    const std::size_t rows = g.size() / features_;
    auto gm = as_matrix(g, rows, features_);
    auto xh = as_matrix(xhat_, rows, features_);
    const ConstVecMap gamma(gamma_.value.data(), Eigen::Index(features_));
    VecMap(gamma_.grad.data(), Eigen::Index(features_)) = (gm.array() * xh.array()).colwise().sum();
    VecMap(beta_.grad.data(), Eigen::Index(features_)) = gm.colwise().sum();
    Tensor dx(g.shape());
    auto dxm = as_matrix(dx, rows, features_);
    const Eigen::RowVectorXd scale = (gamma.array() * inv_std_.array()).matrix();
    if (train_cache_) {
      const double m = double(rows);
      const Eigen::RowVectorXd sum_g = gm.colwise().sum();
      const Eigen::RowVectorXd sum_gx = (gm.array() * xh.array()).colwise().sum();
      dxm = ((((gm.array() * m).rowwise() - sum_g.array()) - (xh.array().rowwise() * sum_gx.array()))
                 .rowwise() *
             (scale.array() / m))
                .matrix();
    } else {
      dxm = (gm.array().rowwise() * scale.array()).matrix();
    }
    has_cache_ = false;
    xhat_ = Tensor();
    return dx;
  }

  std::vector<Param*> params() override { return {&gamma_, &beta_}; }
  std::vector<Tensor*> buffers() override { return {&running_mean_, &running_var_}; }

  bool running_stats_ready() const override { return stats_updated_; }
  void set_running_stats_ready(bool ready) override { stats_updated_ = ready; }

 private:
  std::size_t features_;
  double momentum_, epsilon_;
  Param gamma_, beta_;
  Tensor running_mean_, running_var_;
  Tensor xhat_;
  Eigen::RowVectorXd inv_std_;
  bool train_cache_ = false;
  bool has_cache_ = false;
  bool stats_updated_ = false;
  bool warned_ = false;
};

// ---------------------------------------------------------------------------

class FlattenLayer final : public Layer {
 public:
  LayerSpec spec() const override { return LayerSpec::flatten(); }
  Shape output_shape(const Shape& input) const override { return {1, numel(input)}; }

  Tensor forward(const Tensor& x, Mode, Rng&) override {
    require_batch(x, "flatten");
    input_shape_ = x.shape();
    has_cache_ = true;
    return x.reshaped({x.dim(0), 1, x.size() / x.dim(0)});
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("flatten");
    has_cache_ = false;
    return g.reshaped(input_shape_);
  }

 private:
  Shape input_shape_;
  bool has_cache_ = false;
};

// ---------------------------------------------------------------------------

class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(ActivationKind kind) : kind_(kind) {}

  LayerSpec spec() const override { return LayerSpec::activation_of(kind_); }
  Shape output_shape(const Shape& input) const override { return input; }

  Tensor forward(const Tensor& x, Mode, Rng&) override {
    input_ = x;
    has_cache_ = true;
    switch (kind_) {
      case ActivationKind::Relu: return relu(x);
      case ActivationKind::Softsign: return softsign(x);
      case ActivationKind::Linear: break;
    }
    return x;
  }

  Tensor backward(const Tensor& g) override {
    if (!has_cache_) no_forward("activation");
    Tensor dx = g;
    if (kind_ == ActivationKind::Relu) {
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(input_[i] > 0.0)) dx[i] = 0.0;
      }
    } else if (kind_ == ActivationKind::Softsign) {
      for (std::size_t i = 0; i < dx.size(); ++i) {
        const double d = 1.0 + std::abs(input_[i]);
        dx[i] /= d * d;
      }
    }
    has_cache_ = false;
    input_ = Tensor();
    return dx;
  }

 private:
  ActivationKind kind_;
  Tensor input_;
  bool has_cache_ = false;
};

}  // namespace

// ---------------------------------------------------------------------------

LayerSpec LayerSpec::dense(std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.units = units;
  return s;
}

LayerSpec LayerSpec::conv1d(std::size_t filters, std::size_t kernel, ConvOrientation orientation) {
  LayerSpec s;
  s.kind = LayerKind::Conv1D;
  s.units = filters;
  s.kernel = kernel;
  s.orientation = orientation;
  return s;
}

LayerSpec LayerSpec::maxpool_axis0(std::size_t pool) {
  LayerSpec s;
  s.kind = LayerKind::MaxPoolAxis0;
  s.pool = pool;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::batchnorm(double momentum, double epsilon) {
  LayerSpec s;
  s.kind = LayerKind::BatchNorm;
  s.momentum = momentum;
  s.epsilon = epsilon;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  return s;
}

LayerSpec LayerSpec::activation_of(ActivationKind kind) {
  LayerSpec s;
  s.kind = LayerKind::Activation;
  s.activation = kind;
  return s;
}

void LayerSpec::validate() const {
  switch (kind) {
    case LayerKind::Dense:
      if (units < 1) throw std::invalid_argument("dense: units must be >= 1");
      break;
    case LayerKind::Conv1D:
      if (units < 1) throw std::invalid_argument("conv1d: filters must be >= 1");
      if (kernel < 1) throw std::invalid_argument("conv1d: kernel must be >= 1");
      break;
    case LayerKind::MaxPoolAxis0:
      if (pool < 1) throw std::invalid_argument("maxpool_axis0: pool size must be >= 1");
      break;
    case LayerKind::Dropout:
      if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0, 1)");
      break;
    case LayerKind::BatchNorm:
      if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("batchnorm: momentum must be in [0, 1)");
      if (!(epsilon > 0.0)) throw std::invalid_argument("batchnorm: epsilon must be > 0");
      break;
    case LayerKind::Flatten:
    case LayerKind::Activation:
      break;
  }
}

std::string kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::MaxPoolAxis0: return "maxpool_axis0";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::BatchNorm: return "batchnorm";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Activation: return "activation";
  }
  return "unknown";
}

std::string activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Linear: return "linear";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Softsign: return "softsign";
  }
  return "unknown";
}

std::string LayerSpec::describe() const {
  std::ostringstream os;
  os << kind_name(kind);
  switch (kind) {
    case LayerKind::Dense: os << "(" << units << ")"; break;
    case LayerKind::Conv1D:
      os << "(filters=" << units << ", kernel=" << kernel << ", "
         << (orientation == ConvOrientation::ChannelsFirst ? "channels_first" : "channels_last") << ")";
      break;
    case LayerKind::MaxPoolAxis0: os << "(" << pool << ")"; break;
    case LayerKind::Dropout: os << "(" << rate << ")"; break;
    case LayerKind::Activation: os << "(" << activation_name(activation) << ")"; break;
    default: break;
  }
  return os.str();
}

std::size_t Layer::parameter_count() {
  std::size_t n = 0;
  for (Param* p : params()) n += p->value.size();
  for (Tensor* t : buffers()) n += t->size();
  return n;
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& init_rng) {
  spec.validate();
  std::unique_ptr<Layer> layer;
  switch (spec.kind) {
    case LayerKind::Dense:
      if (input.empty()) throw ShapeError("dense: empty input shape");
      layer = std::make_unique<DenseLayer>(input.back(), spec.units, init_rng);
      break;
    case LayerKind::Conv1D:
      layer = std::make_unique<Conv1DLayer>(input, spec.units, spec.kernel, spec.orientation, init_rng);
      break;
    case LayerKind::MaxPoolAxis0: layer = std::make_unique<MaxPoolLayer>(spec.pool); break;
    case LayerKind::Dropout: layer = std::make_unique<DropoutLayer>(spec.rate); break;
    case LayerKind::BatchNorm:
      if (input.empty()) throw ShapeError("batchnorm: empty input shape");
      layer = std::make_unique<BatchNormLayer>(input.back(), spec.momentum, spec.epsilon);
      break;
    case LayerKind::Flatten: layer = std::make_unique<FlattenLayer>(); break;
    case LayerKind::Activation: layer = std::make_unique<ActivationLayer>(spec.activation); break;
  }
  layer->output_shape(input);
  return layer;
}

// ---------------------------------------------------------------------------

Tensor softsign(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / (1.0 + std::abs(x[i]));
  return y;
}

Tensor relu(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Tensor dense_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2 || bias.rank() != 1 || bias.dim(0) != weight.dim(1)) {
    throw ShapeError("dense: weight " + to_string(weight.shape()) + " and bias " + to_string(bias.shape()) +
                     " are inconsistent");
  }
  const std::size_t in = weight.dim(0), out = weight.dim(1);
  if (x.rank() == 0 || x.shape().back() != in) {
    throw ShapeError("dense: input " + to_string(x.shape()) + " incompatible with weight " +
                     to_string(weight.shape()));
  }
  Shape yshape = x.shape();
  yshape.back() = out;
  Tensor y(yshape);
  const std::size_t rows = x.size() / in;
  auto ym = as_matrix(y, rows, out);
  ym.noalias() = as_matrix(x, rows, in) * as_matrix(weight, in, out);
  ym.rowwise() += ConstVecMap(bias.data(), Eigen::Index(out));
  return y;
}

Tensor conv1d_forward(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel,
                      ConvOrientation orientation) {
  if (x.rank() != 3) throw ShapeError("conv1d: expected (N, A, B) input, got " + to_string(x.shape()));
  const std::size_t n = x.dim(0);
  const bool cf = orientation == ConvOrientation::ChannelsFirst;
  const std::size_t channels = cf ? x.dim(1) : x.dim(2);
  const std::size_t length = cf ? x.dim(2) : x.dim(1);
  const std::size_t filters = bias.size();
  const std::size_t ck = channels * kernel;
  const Shape expected_w = cf ? Shape{filters, ck} : Shape{ck, filters};
  if (weight.shape() != expected_w) {
    throw ShapeError("conv1d: weight " + to_string(weight.shape()) + " incompatible with input " +
                     to_string(x.shape()) + " (expected " + to_string(expected_w) + ")");
  }
  if (kernel < 1 || kernel > length) {
    throw ShapeError("conv1d: kernel " + std::to_string(kernel) + " exceeds convolved extent " +
                     std::to_string(length));
  }
  const std::size_t out_len = length - kernel + 1;
  const std::size_t sample = channels * length;
  auto w = as_matrix(weight, weight.dim(0), weight.dim(1));
  const ConstVecMap b(bias.data(), Eigen::Index(filters));

  if (cf) {
    Tensor y({n, filters, out_len});
    RowMat cols(ck, out_len);
    for (std::size_t s = 0; s < n; ++s) {
      const double* xs = x.data() + s * sample;
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t j = 0; j < kernel; ++j)
          for (std::size_t t = 0; t < out_len; ++t) cols(c * kernel + j, t) = xs[c * length + t + j];
      MatMap ys(y.data() + s * filters * out_len, Eigen::Index(filters), Eigen::Index(out_len));
      ys.noalias() = w * cols;
      ys.colwise() += b.transpose();
    }
    return y;
  }

  Tensor y({n, out_len, filters});
  const std::size_t rows = n * out_len;
  auto ym = as_matrix(y, rows, filters);
  if (kernel == 1) {
    ym.noalias() = as_matrix(x, rows, channels) * w;
  } else {
    RowMat cols(rows, ck);
    for (std::size_t s = 0; s < n; ++s) {
      const double* xs = x.data() + s * sample;
      for (std::size_t t = 0; t < out_len; ++t)
        for (std::size_t j = 0; j < kernel; ++j)
          for (std::size_t c = 0; c < channels; ++c)
            cols(s * out_len + t, j * channels + c) = xs[(t + j) * channels + c];
    }
    ym.noalias() = cols * w;
  }
  ym.rowwise() += b;
  return y;
}

Tensor maxpool_axis0(const Tensor& x, std::size_t pool) {
  MaxPoolLayer layer(pool);
  Rng rng(0);
  return layer.forward(x, Mode::Eval, rng);
}

}  // namespace linetrace::nn
