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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "langadv/autodiff.hpp"

namespace langadv {

struct LossConfig {
  double temperature = 0.07;
  std::int64_t warmup_steps = 200;
  std::int64_t ramp_steps = 500;
  double lambda_max = 0.1;
  // Default total is L_spk + lambda * L_lang with L_lang computed behind the
  // reversal layer, so the head sees -lambda^2 and the classifier lambda.
  // unit_lang_weight uses weight 1 instead (lambda only inside the GRL).
  bool unit_lang_weight = false;

  void Validate() const;
};

struct BatchLabels {
  std::vector<int> voice_ids;
  std::vector<int> language_ids;

  // Equal lengths, a same-voice pair and at least two distinct voices.
  void Validate() const;
};

// Supervised contrastive loss over L2-normalized rows of `z` (B x E):
//   (1/B') sum_i -log( sum_{j in P(i)} e^{s_ij} / sum_{j != i} e^{s_ij} ),
//   s_ij = z_i . z_j / temperature,
// with P(i) the other items sharing i's voice. Items without a positive are
// left out of the average; their count goes to `dropped` when given.
Var SupConLoss(const Var& z, std::span<const int> voice_ids,
               double temperature, std::size_t* dropped = nullptr);

// Mean cross-entropy of softmax(logits) against integer labels.
Var LanguageCrossEntropy(const Var& logits, std::span<const int> labels);

// Warmup at 0, linear ramp to lambda_max, then hold.
double LambdaAt(std::int64_t step, const LossConfig& config);

// spk + lang_weight * lang.
Var TotalLoss(const Var& spk, const Var& lang, double lang_weight);

}  // namespace langadv
