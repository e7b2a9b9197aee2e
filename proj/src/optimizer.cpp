// Copyright (c) 2026 The langadv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "langadv/optimizer.hpp"

#include <cmath>

#include "langadv/error.hpp"

namespace langadv {

void OptimConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw DataError("learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw DataError("weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw DataError("betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw DataError("epsilon must be > 0");
  if (!(clip_norm > 0.0)) throw DataError("clip_norm must be > 0");
}

OptimState OptimState::ZerosLike(std::span<const Tensor* const> params) {
  OptimState s;
  for (const Tensor* p : params) {
    s.m.emplace_back(p->shape(), 0.0);
    s.v.emplace_back(p->shape(), 0.0);
  }
  return s;
}

double ClipGlobalNorm(std::span<Tensor* const> grads, double clip_norm) {
  if (!(clip_norm > 0.0)) throw DataError("clip_norm must be > 0");
  double ss = 0.0;
  for (const Tensor* g : grads) {
    RequireFinite(*g, "clip_global_norm");
    for (double x : g->data()) ss += x * x;
  }
  const double norm = std::sqrt(ss);
  if (norm <= clip_norm) return 1.0;
  const double scale = clip_norm / norm;
  for (Tensor* g : grads) {
    for (double& x : g->data()) x *= scale;
  }
  return scale;
}

void AdamWStep(std::span<Tensor* const> params,
               std::span<const Tensor* const> grads,
               const std::vector<bool>& decay_mask, OptimState& state,
               const OptimConfig& config) {
  if (params.size() != grads.size() || params.size() != decay_mask.size() ||
      params.size() != state.m.size() || params.size() != state.v.size()) {
    throw ShapeError("adamw: parameter/gradient/state count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i]->shape() ||
        params[i]->shape() != state.m[i].shape() ||
        params[i]->shape() != state.v[i].shape()) {
      throw ShapeError("adamw: shape mismatch for parameter " +
                       std::to_string(i));
    }
    RequireFinite(*grads[i], "adamw gradient");
  }

  const std::int64_t t = state.step_count + 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  const double lr = config.learning_rate;

  // Compute into copies first so a non-finite update leaves state untouched.
  std::vector<Tensor> new_params, new_m, new_v;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor theta = *params[i];
    Tensor m = state.m[i];
    Tensor v = state.v[i];
    const Tensor& g = *grads[i];
    const double decay = 1.0 - lr * (decay_mask[i] ? config.weight_decay : 0.0);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      theta[k] = theta[k] * decay -
                 lr * (m_hat / (std::sqrt(v_hat) + config.epsilon));
    }
    RequireFinite(theta, "adamw update");
    new_params.push_back(std::move(theta));
    new_m.push_back(std::move(m));
    new_v.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    *params[i] = std::move(new_params[i]);
    state.m[i] = std::move(new_m[i]);
    state.v[i] = std::move(new_v[i]);
  }
  state.step_count = t;
}

}  // namespace langadv
