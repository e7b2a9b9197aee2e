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

#include "langadv/model.hpp"

#include <cmath>
#include <string>

#include "langadv/error.hpp"

namespace langadv {

void ModelConfig::Validate() const {
  if (input_dim < 1 || hidden_dim < 1 || embed_dim < 1 ||
      classifier_hidden < 1 || num_languages < 1) {
    throw DataError("model dimensions must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw DataError("dropout_rate must be in [0, 1)");
  }
}

std::vector<const Tensor*> ModelParams::All() const {
  return {&w1, &b1, &w2, &b2, &c1, &cb1, &c2, &cb2};
}

std::vector<Tensor*> ModelParams::All() {
  return {&w1, &b1, &w2, &b2, &c1, &cb1, &c2, &cb2};
}

std::vector<bool> ModelParams::DecayMask() {
  return {true, false, true, false, true, false, true, false};
}

std::size_t ModelParams::ParameterCount() const {
  std::size_t n = 0;
  for (const Tensor* t : All()) n += t->size();
  return n;
}

namespace {

std::vector<Shape> ExpectedShapes(const ModelConfig& c) {
  return {{c.input_dim, c.hidden_dim},        {1, c.hidden_dim},
          {c.hidden_dim, c.embed_dim},        {1, c.embed_dim},
          {c.embed_dim, c.classifier_hidden}, {1, c.classifier_hidden},
          {c.classifier_hidden, c.num_languages}, {1, c.num_languages}};
}

const char* const kNames[] = {"w1", "b1", "w2", "b2", "c1", "cb1", "c2", "cb2"};

Var Affine(const Var& x, const Var& w, const Var& b) {
  // Bias broadcast as ones(B x 1) * b(1 x out).
  Var ones = Constant(Tensor({x.value().rows(), 1}, 1.0));
  return Add(MatMul(x, w), MatMul(ones, b));
}

}  // namespace

void ModelParams::CheckShapes(const ModelConfig& config) const {
  const auto expected = ExpectedShapes(config);
  const auto all = All();
  for (std::size_t i = 0; i < kNumTensors; ++i) {
    if (all[i]->shape() != expected[i]) {
      throw ShapeError(std::string("parameter ") + kNames[i] + " has shape " +
                       ShapeToString(all[i]->shape()) + ", expected " +
                       ShapeToString(expected[i]));
    }
  }
}

ModelParams InitParams(const ModelConfig& config, Rng& rng) {
  config.Validate();
  ModelParams p = ZeroParams(config);
  for (Tensor* w : {&p.w1, &p.w2, &p.c1, &p.c2}) {
    const double std = std::sqrt(2.0 / static_cast<double>(w->rows()));
    for (double& x : w->data()) x = std * rng.Normal();
  }
  return p;
}

ModelParams ZeroParams(const ModelConfig& config) {
  config.Validate();
  const auto shapes = ExpectedShapes(config);
  ModelParams p;
  auto all = p.All();
  for (std::size_t i = 0; i < ModelParams::kNumTensors; ++i) {
    *all[i] = Tensor(shapes[i], 0.0);
  }
  return p;
}

ModelVars ModelVars::Trainable(const ModelParams& p) {
  return {Parameter(p.w1), Parameter(p.b1), Parameter(p.w2),
          Parameter(p.b2), Parameter(p.c1), Parameter(p.cb1),
          Parameter(p.c2), Parameter(p.cb2)};
}

ModelVars ModelVars::Frozen(const ModelParams& p) {
  return {Constant(p.w1), Constant(p.b1), Constant(p.w2), Constant(p.b2),
          Constant(p.c1), Constant(p.cb1), Constant(p.c2), Constant(p.cb2)};
}

ModelVars ModelVars::FrozenClassifier(const ModelParams& p) {
  return {Parameter(p.w1), Parameter(p.b1), Parameter(p.w2),
          Parameter(p.b2), Constant(p.c1),  Constant(p.cb1),
          Constant(p.c2),  Constant(p.cb2)};
}

std::vector<Var> ModelVars::All() const {
  return {w1, b1, w2, b2, c1, cb1, c2, cb2};
}

Tensor MeanPool(const Tensor& frames) {
  if (frames.empty() || frames.rank() != 2) {
    throw ShapeError("mean_pool: expected a non-empty T x D frame matrix");
  }
  const std::size_t t = frames.rows(), d = frames.cols();
  std::vector<double> sum(d, 0.0);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t c = 0; c < d; ++c) sum[c] += frames[r * d + c];
  }
  for (double& v : sum) v /= static_cast<double>(t);
  return Tensor::Vector(std::move(sum));
}

Var ProjectPooled(const ModelVars& vars, const ModelConfig& config,
                  const Var& pooled, bool training, Rng* dropout_rng) {
  if (pooled.value().rank() != 2 || pooled.value().cols() != config.input_dim) {
    throw ShapeError("embed: expected B x " + std::to_string(config.input_dim) +
                     " features, got " + ShapeToString(pooled.shape()));
  }
  Var h = Relu(Affine(pooled, vars.w1, vars.b1));
  if (training && config.dropout_rate > 0.0) {
    if (!dropout_rng) throw DataError("embed: training mode needs an rng");
    h = Dropout(h, config.dropout_rate, *dropout_rng);
  }
  return L2NormalizeRows(Affine(h, vars.w2, vars.b2));
}

Embedding Embed(const ModelParams& params, const ModelConfig& config,
                const Tensor& frames) {
  if (frames.rank() != 2 || frames.cols() != config.input_dim) {
    throw ShapeError("embed: frame dimension " +
                     ShapeToString(frames.shape()) + " does not match " +
                     "input_dim " + std::to_string(config.input_dim));
  }
  Tensor pooled = MeanPool(frames);
  Var x = Constant(Tensor({1, config.input_dim}, pooled.values()));
  Var z = ProjectPooled(ModelVars::Frozen(params), config, x, false, nullptr);
  // rows below the norm floor come out shorter than unit length
  double ss = 0.0;
  for (double v : z.value().data()) ss += v * v;
  return {z.value().values(), std::abs(std::sqrt(ss) - 1.0) <= 1e-9};
}

Var GradientReversal(const Var& z, double lambda) {
  if (!(lambda >= 0.0)) throw DataError("gradient reversal: lambda < 0");
  return ScaleGradient(z, -lambda);
}

Var ClassifyLanguage(const ModelVars& vars, const ModelConfig& config,
                     const Var& z) {
  if (z.value().rank() != 2 || z.value().cols() != config.embed_dim) {
    throw ShapeError("classify_language: expected B x " +
                     std::to_string(config.embed_dim) + " input, got " +
                     ShapeToString(z.shape()));
  }
  Var h = Relu(Affine(z, vars.c1, vars.cb1));
  return Affine(h, vars.c2, vars.cb2);
}

}  // namespace langadv
