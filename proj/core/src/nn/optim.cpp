// SPDX-License-Identifier: Apache-2.0
#include "linetrace/nn/optim.hpp"

#include <cmath>
#include <string>

#include "linetrace/error.hpp"

namespace linetrace::nn {

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mse_loss: prediction " + to_string(pred.shape()) + " vs target " +
                     to_string(target.shape()));
  }
  if (pred.size() == 0) throw ShapeError("mse_loss: empty tensors");
  LossResult r{0.0, Tensor(pred.shape())};
  const double count = double(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.loss += d * d;
    r.grad[i] = 2.0 * d / count;
  }
  r.loss /= count;
  if (!std::isfinite(r.loss)) throw NonFiniteError("mse_loss: non-finite loss");
  return r;
}

void adam_step(std::span<Param* const> params, AdamState& state) {
  for (const Param* p : params) {
    if (p->grad.shape() != p->value.shape()) {
      throw ShapeError("adam: gradient shape mismatch for '" + p->name + "'");
    }
    if (!p->grad.all_finite()) throw NonFiniteError("adam: non-finite gradient in '" + p->name + "'");
  }
  if (state.m.empty()) {
    for (const Param* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam: parameter list changed between steps");

  state.t += 1;
  const AdamConfig& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, double(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    if (m.shape() != p.value.shape()) throw ShapeError("adam: moment shape mismatch for '" + p.name + "'");
    double* theta = p.value.data();
    const double* g = p.grad.data();
    double* mp = m.data();
    double* vp = v.data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      mp[i] = c.beta1 * mp[i] + (1.0 - c.beta1) * g[i];
      vp[i] = c.beta2 * vp[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = mp[i] / bc1;
      const double v_hat = vp[i] / bc2;
      theta[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace linetrace::nn
