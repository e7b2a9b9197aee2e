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

#include "langadv/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "langadv/error.hpp"

namespace langadv {

namespace detail {

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;
};

}  // namespace detail

using detail::Node;

const Tensor& Var::value() const { return node_->value; }
const Tensor& Var::grad() const { return node_->grad; }
bool Var::requires_grad() const { return node_->requires_grad; }

Var Constant(Tensor value) {
  RequireFinite(value, "constant");
  auto node = std::make_shared<Node>();
  node->grad = Tensor(value.shape(), 0.0);
  node->value = std::move(value);
  return Var(std::move(node));
}

Var Parameter(Tensor value) {
  RequireFinite(value, "parameter");
  auto node = std::make_shared<Node>();
  node->grad = Tensor(value.shape(), 0.0);
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var MakeOp(Tensor value, std::vector<Var> parents, BackwardFn backward) {
  RequireFinite(value, "op output");
  auto node = std::make_shared<Node>();
  node->grad = Tensor(value.shape(), 0.0);
  node->value = std::move(value);
  for (const Var& p : parents) {
    if (!p.defined()) throw DataError("MakeOp: undefined parent");
    node->requires_grad = node->requires_grad || p.requires_grad();
    node->parents.push_back(p.node_);
  }
  if (node->requires_grad) node->backward = std::move(backward);
  return Var(std::move(node));
}

namespace {

void RequireSameShape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

void RequireMatrix(const Var& a, const char* op) {
  if (a.value().rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got " +
                     ShapeToString(a.shape()));
  }
}

}  // namespace

Var MatMul(const Var& a, const Var& b) {
  RequireMatrix(a, "matmul");
  RequireMatrix(b, "matmul");
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  if (B.rows() != k) {
    throw ShapeError("matmul: inner dimensions disagree " +
                     ShapeToString(A.shape()) + " x " +
                     ShapeToString(B.shape()));
  }
  Tensor C({m, n}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* c_row = &C[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* b_row = &B[p * n];
      for (std::size_t j = 0; j < n; ++j) c_row[j] += aip * b_row[j];
    }
  }
  return MakeOp(std::move(C), {a, b},
                [a, b, m, k, n](const Tensor& g, std::span<Tensor* const> out) {
                  const Tensor& A = a.value();
                  const Tensor& B = b.value();
                  if (Tensor* ga = out[0]) {
                    for (std::size_t i = 0; i < m; ++i) {
                      for (std::size_t p = 0; p < k; ++p) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < n; ++j) {
                          s += g[i * n + j] * B[p * n + j];
                        }
                        (*ga)[i * k + p] += s;
                      }
                    }
                  }
                  if (Tensor* gb = out[1]) {
                    for (std::size_t i = 0; i < m; ++i) {
                      for (std::size_t p = 0; p < k; ++p) {
                        const double aip = A[i * k + p];
                        if (aip == 0.0) continue;
                        for (std::size_t j = 0; j < n; ++j) {
                          (*gb)[p * n + j] += aip * g[i * n + j];
                        }
                      }
                    }
                  }
                });
}

Var Add(const Var& a, const Var& b) {
  RequireSameShape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return MakeOp(std::move(out), {a, b},
                [](const Tensor& g, std::span<Tensor* const> out) {
                  for (Tensor* t : out) {
                    if (!t) continue;
                    for (std::size_t i = 0; i < g.size(); ++i) (*t)[i] += g[i];
                  }
                });
}

Var Sub(const Var& a, const Var& b) {
  RequireSameShape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return MakeOp(std::move(out), {a, b},
                [](const Tensor& g, std::span<Tensor* const> out) {
                  if (out[0]) {
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      (*out[0])[i] += g[i];
                    }
                  }
                  if (out[1]) {
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      (*out[1])[i] -= g[i];
                    }
                  }
                });
}

Var Mul(const Var& a, const Var& b) {
  RequireSameShape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return MakeOp(std::move(out), {a, b},
                [a, b](const Tensor& g, std::span<Tensor* const> out) {
                  if (out[0]) {
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      (*out[0])[i] += g[i] * b.value()[i];
                    }
                  }
                  if (out[1]) {
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      (*out[1])[i] += g[i] * a.value()[i];
                    }
                  }
                });
}

Var Scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& x : out.data()) x *= factor;
  return MakeOp(std::move(out), {a},
                [factor](const Tensor& g, std::span<Tensor* const> out) {
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    (*out[0])[i] += factor * g[i];
                  }
                });
}

Var Relu(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
  return MakeOp(std::move(out), {a},
                [a](const Tensor& g, std::span<Tensor* const> out) {
                  const Tensor& x = a.value();
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    if (x[i] > 0.0) (*out[0])[i] += g[i];
                  }
                });
}

Var Exp(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.data()) x = std::exp(x);
  Tensor val = out;
  return MakeOp(std::move(out), {a},
                [val = std::move(val)](const Tensor& g,
                                       std::span<Tensor* const> out) {
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    (*out[0])[i] += g[i] * val[i];
                  }
                });
}

Var Log(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.data()) {
    if (!(x > 0.0)) throw NumericalError("log of non-positive value");
    x = std::log(x);
  }
  return MakeOp(std::move(out), {a},
                [a](const Tensor& g, std::span<Tensor* const> out) {
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    (*out[0])[i] += g[i] / a.value()[i];
                  }
                });
}

Var Sum(const Var& a) {
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  return MakeOp(Tensor::Scalar(s), {a},
                [](const Tensor& g, std::span<Tensor* const> out) {
                  const double gs = g[0];
                  for (double& x : out[0]->data()) x += gs;
                });
}

Var L2NormalizeRows(const Var& a) {
  const Tensor& x = a.value();
  if (x.rank() > 2) throw ShapeError("l2_normalize_rows: rank > 2");
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out = x;
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (double v : x.row(r)) ss += v * v;
    norms[r] = std::max(std::sqrt(ss), kNormFloor);
    for (double& v : out.row(r)) v /= norms[r];
  }
  Tensor y = out;
  return MakeOp(
      std::move(out), {a},
      [y = std::move(y), norms = std::move(norms), rows, cols](
          const Tensor& g, std::span<Tensor* const> out) {
        for (std::size_t r = 0; r < rows; ++r) {
          const double n = norms[r];
          const double* yr = &y[r * cols];
          const double* gr = &g[r * cols];
          double* dr = &(*out[0])[r * cols];
          if (n > kNormFloor) {
            double dot = 0.0;
            for (std::size_t c = 0; c < cols; ++c) dot += yr[c] * gr[c];
            for (std::size_t c = 0; c < cols; ++c) {
              dr[c] += (gr[c] - yr[c] * dot) / n;
            }
          } else {
            // Floor active: the map is x / 1e-12, linear in x.
            for (std::size_t c = 0; c < cols; ++c) dr[c] += gr[c] / n;
          }
        }
      });
}

Var MeanOverRows(const Var& a) {
  const Tensor& x = a.value();
  if (x.rank() != 2) throw ShapeError("mean_over_rows: expected a matrix");
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({1, cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c] += x[r * cols + c];
  }
  for (double& v : out.data()) v /= static_cast<double>(rows);
  return MakeOp(std::move(out), {a},
                [rows, cols](const Tensor& g, std::span<Tensor* const> out) {
                  const double inv = 1.0 / static_cast<double>(rows);
                  for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < cols; ++c) {
                      (*out[0])[r * cols + c] += g[c] * inv;
                    }
                  }
                });
}

Var StackRows(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no rows");
  const std::size_t cols = rows.front().value().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const Var& r : rows) {
    if (r.value().size() != cols || r.value().rows() != 1) {
      throw ShapeError("stack_rows: rows must be 1 x " + std::to_string(cols));
    }
    data.insert(data.end(), r.value().data().begin(), r.value().data().end());
  }
  std::vector<Var> parents(rows.begin(), rows.end());
  return MakeOp(Tensor({rows.size(), cols}, std::move(data)),
                std::move(parents),
                [cols](const Tensor& g, std::span<Tensor* const> out) {
                  for (std::size_t r = 0; r < out.size(); ++r) {
                    if (!out[r]) continue;
                    for (std::size_t c = 0; c < cols; ++c) {
                      (*out[r])[c] += g[r * cols + c];
                    }
                  }
                });
}

Var Dropout(const Var& a, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw DataError("dropout rate must be in [0, 1)");
  }
  if (rate == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(a.shape(), 0.0);
  for (double& m : mask.data()) m = rng.Uniform() >= rate ? keep_scale : 0.0;
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return MakeOp(std::move(out), {a},
                [mask = std::move(mask)](const Tensor& g,
                                         std::span<Tensor* const> out) {
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    (*out[0])[i] += g[i] * mask[i];
                  }
                });
}

Var ScaleGradient(const Var& a, double factor) {
  return MakeOp(a.value(), {a},
                [factor](const Tensor& g, std::span<Tensor* const> out) {
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    (*out[0])[i] += factor * g[i];
                  }
                });
}

void Backward(const Var& loss) {
  if (!loss.defined()) throw DataError("backward: undefined loss");
  if (loss.value().size() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " +
                     ShapeToString(loss.shape()));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node_.get(), 0);
  visited.insert(loss.node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) n->grad.Fill(0.0);
  loss.node_->grad[0] = 1.0;

  std::vector<Tensor*> slots;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward) continue;
    slots.clear();
    for (const auto& p : n->parents) {
      slots.push_back(p->requires_grad ? &p->grad : nullptr);
    }
    n->backward(n->grad, slots);
  }
}

GradCheckResult GradCheck(const ScalarFn& f, const std::vector<Tensor>& params,
                          const GradCheckOptions& options) {
  return GradCheck(
      f,
      [&f](std::span<const Var> leaves, std::size_t) {
        return f(leaves).value().item();
      },
      params, options);
}

GradCheckResult GradCheck(const ScalarFn& f, const NumericFn& numeric,
                          const std::vector<Tensor>& params,
                          const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw DataError("grad_check: epsilon <= 0");

  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const Tensor& p : params) leaves.push_back(Parameter(p));
  Var loss = f(leaves);
  if (loss.value().size() != 1) throw ShapeError("grad_check: non-scalar f");
  if (!loss.value().AllFinite()) throw NumericalError("grad_check: loss");
  Backward(loss);

  // Perturbed copies live in constant leaves that are edited in place, so
  // large weight matrices are not copied per evaluation.
  std::vector<Var> work;
  work.reserve(params.size());
  for (const Tensor& p : params) work.push_back(Constant(p));
  auto evaluate = [&](std::size_t param_index) {
    const double v = numeric(work, param_index);
    if (!std::isfinite(v)) throw NumericalError("grad_check: non-finite loss");
    return v;
  };

  Rng rng(options.seed);
  GradCheckResult result;
  const double eps = options.epsilon;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const std::size_t n = params[pi].size();
    std::vector<std::size_t> coords;
    if (options.max_coords_per_tensor == 0 ||
        options.max_coords_per_tensor >= n) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      coords = rng.SampleWithoutReplacement(n, options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t idx : coords) {
      double& slot = work[pi].node()->value[idx];
      const double orig = slot;
      slot = orig + eps;
      const double up = evaluate(pi);
      slot = orig - eps;
      const double down = evaluate(pi);
      slot = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = leaves[pi].grad()[idx];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double err = std::abs(analytic - numeric) / denom;
      ++result.coords_checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_param = pi;
        result.worst_index = idx;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace langadv
