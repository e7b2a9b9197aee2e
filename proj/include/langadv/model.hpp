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
#include <vector>

#include "langadv/autodiff.hpp"
#include "langadv/rng.hpp"
#include "langadv/tensor.hpp"

namespace langadv {

// Projection head input_dim -> hidden_dim -> embed_dim (ReLU, dropout after
// the hidden activation) and a language classifier
// embed_dim -> classifier_hidden -> num_languages.
struct ModelConfig {
  std::size_t input_dim = 768;
  std::size_t hidden_dim = 512;
  std::size_t embed_dim = 256;
  std::size_t classifier_hidden = 128;
  std::size_t num_languages = 4;
  double dropout_rate = 0.1;

  void Validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Weights are stored (fan_in x fan_out) so a layer is x * W + b; biases are
// 1 x fan_out rows.
struct ModelParams {
  Tensor w1, b1, w2, b2;  // projection head
  Tensor c1, cb1, c2, cb2;  // language classifier

  static constexpr std::size_t kNumTensors = 8;
  static constexpr std::size_t kNumHeadTensors = 4;

  // Declaration order: w1, b1, w2, b2, c1, cb1, c2, cb2.
  std::vector<const Tensor*> All() const;
  std::vector<Tensor*> All();
  // True for weight matrices, false for biases, in All() order.
  static std::vector<bool> DecayMask();

  std::size_t ParameterCount() const;
  // Throws ShapeError if any tensor disagrees with `config`.
  void CheckShapes(const ModelConfig& config) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// He-normal weights (std sqrt(2 / fan_in)), zero biases.
ModelParams InitParams(const ModelConfig& config, Rng& rng);
ModelParams ZeroParams(const ModelConfig& config);

// Graph leaves for one forward pass. Trainable leaves are Parameter nodes;
// frozen ones are Constant nodes.
struct ModelVars {
  Var w1, b1, w2, b2;
  Var c1, cb1, c2, cb2;

  static ModelVars Trainable(const ModelParams& p);
  static ModelVars Frozen(const ModelParams& p);
  // Head trainable, classifier constant.
  static ModelVars FrozenClassifier(const ModelParams& p);
  std::vector<Var> All() const;
};

struct Embedding {
  std::vector<double> vector;
  bool normalized = false;
};

// Column means of a T x D frame matrix, returned as a D-vector.
Tensor MeanPool(const Tensor& frames);

// Maps B x input_dim pooled features to L2-normalized B x embed_dim
// embeddings. With training == true, dropout draws from `dropout_rng`; with
// training == false no randomness is consumed and the rng may be null.
Var ProjectPooled(const ModelVars& vars, const ModelConfig& config,
                  const Var& pooled, bool training, Rng* dropout_rng);

// Evaluation-mode embedding of one clip's frames.
Embedding Embed(const ModelParams& params, const ModelConfig& config,
                const Tensor& frames);

// Gradient-reversal layer: identity forward, upstream gradient times
// -lambda on the way back.
Var GradientReversal(const Var& z, double lambda);

// B x embed_dim -> B x num_languages logits (no softmax).
Var ClassifyLanguage(const ModelVars& vars, const ModelConfig& config,
                     const Var& z);

}  // namespace langadv
