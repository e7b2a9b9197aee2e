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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "langadv/tensor.hpp"

namespace langadv {

struct OptimConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;

  void Validate() const;
};

struct OptimState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t step_count = 0;

  // Zero moments shaped like `params`.
  static OptimState ZerosLike(std::span<const Tensor* const> params);
  friend bool operator==(const OptimState&, const OptimState&) = default;
};

// Scales all gradients by clip_norm / g when their joint L2 norm g exceeds
// clip_norm. Returns the applied scale (1.0 when unclipped).
double ClipGlobalNorm(std::span<Tensor* const> grads, double clip_norm);

// One AdamW update with bias correction and decoupled weight decay
//   theta <- theta * (1 - lr * wd) - lr * m_hat / (sqrt(v_hat) + eps)
// with the decay taken on the pre-update value and only for tensors whose
// decay_mask entry is set.
void AdamWStep(std::span<Tensor* const> params,
               std::span<const Tensor* const> grads,
               const std::vector<bool>& decay_mask, OptimState& state,
               const OptimConfig& config);

}  // namespace langadv
