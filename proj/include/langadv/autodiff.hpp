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

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "langadv/rng.hpp"
#include "langadv/tensor.hpp"

namespace langadv {

namespace detail {
struct Node;
}

// Handle to a node in a dynamically built computation graph. Copies share
// the node. Graphs are single-threaded.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  // Gradient from the most recent Backward() that reached this node. Zero
  // tensor of the value's shape if unreached.
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  bool defined() const { return node_ != nullptr; }

  detail::Node* node() const { return node_.get(); }

 private:
  explicit Var(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend Var MakeOp(Tensor, std::vector<Var>,
                    std::function<void(const Tensor&,
                                       std::span<Tensor* const>)>);
  friend Var Constant(Tensor);
  friend Var Parameter(Tensor);
  friend void Backward(const Var&);
};

// Leaves.
Var Constant(Tensor value);
Var Parameter(Tensor value);

// Backward rule for a custom op: receives the upstream gradient (shape of
// the op's value) and one slot per parent. A slot is null when that parent
// does not require a gradient; otherwise the rule must accumulate into it.
using BackwardFn =
    std::function<void(const Tensor& upstream, std::span<Tensor* const>)>;

// Registers a node computed outside this file (fused losses). `value` must be
// finite.
Var MakeOp(Tensor value, std::vector<Var> parents, BackwardFn backward);

// Core ops. Broadcasting is limited to scalar-with-tensor in Scale/AddScalar;
// the binary ops require equal shapes.
Var MatMul(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double factor);
Var Relu(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
Var Sum(const Var& a);
// Rows divided by max(||row||_2, kNormFloor).
Var L2NormalizeRows(const Var& a);
// T x D -> 1 x D column means.
Var MeanOverRows(const Var& a);
// Stacks 1 x D (or D) rows into an N x D matrix.
Var StackRows(std::span<const Var> rows);
// Inverted dropout; kept units scaled by 1/(1 - rate). Consumes one uniform
// draw per element from `rng`.
Var Dropout(const Var& a, double rate, Rng& rng);
// Identity forward; backward multiplies the upstream gradient by `factor`.
Var ScaleGradient(const Var& a, double factor);

inline constexpr double kNormFloor = 1e-12;

// Reverse pass from a scalar loss. Zeroes, then fills, the gradient of every
// node reachable from `loss`; each node is visited once in reverse
// topological order and shared subexpressions accumulate.
void Backward(const Var& loss);

struct GradCheckOptions {
  double epsilon = 1e-5;
  // 0 checks every coordinate; otherwise at most this many coordinates per
  // parameter tensor, chosen with `seed`.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 1337;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares reverse-mode gradients of `f` with central differences:
//   max |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// `f` must be deterministic and return a scalar built from the given leaves.
using ScalarFn = std::function<Var(std::span<const Var>)>;
GradCheckResult GradCheck(const ScalarFn& f, const std::vector<Tensor>& params,
                          const GradCheckOptions& options = {});

// Variant whose finite differences come from a separate scalar function,
// told which parameter tensor is being perturbed. Used where the analytic
// graph deliberately differs from the plain loss (gradient reversal).
using NumericFn =
    std::function<double(std::span<const Var>, std::size_t param_index)>;
GradCheckResult GradCheck(const ScalarFn& analytic, const NumericFn& numeric,
                          const std::vector<Tensor>& params,
                          const GradCheckOptions& options = {});

}  // namespace langadv
