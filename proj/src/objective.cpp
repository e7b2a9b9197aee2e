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

#include "langadv/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "langadv/error.hpp"

namespace langadv {

void LossConfig::Validate() const {
  if (!(temperature > 0.0)) throw DataError("temperature must be > 0");
  if (warmup_steps < 0) throw DataError("warmup_steps must be >= 0");
  if (ramp_steps < 1) throw DataError("ramp_steps must be >= 1");
  if (!(lambda_max >= 0.0)) throw DataError("lambda_max must be >= 0");
}

void BatchLabels::Validate() const {
  if (voice_ids.size() != language_ids.size()) {
    throw DataError("batch labels: voice/language length mismatch");
  }
  std::set<int> seen;
  bool has_positive = false;
  for (int v : voice_ids) has_positive |= !seen.insert(v).second;
  if (!has_positive) throw DataError("batch labels: no same-voice pair");
  if (seen.size() < 2) throw DataError("batch labels: fewer than two voices");
}

namespace {

// log(sum_j exp(x_j)) over the selected entries, max-subtracted.
double LogSumExp(std::span<const double> x, const std::vector<char>& mask) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (mask[j]) m = std::max(m, x[j]);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (mask[j]) s += std::exp(x[j] - m);
  }
  return m + std::log(s);
}

}  // namespace

Var SupConLoss(const Var& z, std::span<const int> voice_ids,
               double temperature, std::size_t* dropped) {
  const Tensor& zv = z.value();
  if (zv.rank() != 2) throw ShapeError("supcon: expected B x E embeddings");
  const std::size_t b = zv.rows(), e = zv.cols();
  if (b < 2) throw DataError("supcon: batch size must be >= 2");
  if (voice_ids.size() != b) throw ShapeError("supcon: label count mismatch");
  if (!(temperature > 0.0)) throw DataError("supcon: temperature must be > 0");

  // Scaled similarities.
  std::vector<double> s(b * b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < e; ++k) dot += zv[i * e + k] * zv[j * e + k];
      s[i * b + j] = dot / temperature;
    }
  }

  // Per-anchor softmax weights over the denominator and the positives; the
  // gradient wrt s_ij is (den_ij - pos_ij) / B'.
  std::vector<double> coeff(b * b, 0.0);
  std::size_t anchors = 0;
  double total = 0.0;
  std::vector<char> den_mask(b), pos_mask(b);
  for (std::size_t i = 0; i < b; ++i) {
    bool any_pos = false;
    for (std::size_t j = 0; j < b; ++j) {
      den_mask[j] = j != i;
      pos_mask[j] = j != i && voice_ids[j] == voice_ids[i];
      any_pos = any_pos || pos_mask[j];
    }
    if (!any_pos) continue;
    ++anchors;
    std::span<const double> row(&s[i * b], b);
    const double lse_den = LogSumExp(row, den_mask);
    const double lse_pos = LogSumExp(row, pos_mask);
    total += lse_den - lse_pos;
    for (std::size_t j = 0; j < b; ++j) {
      double c = 0.0;
      if (den_mask[j]) c += std::exp(row[j] - lse_den);
      if (pos_mask[j]) c -= std::exp(row[j] - lse_pos);
      coeff[i * b + j] = c;
    }
  }
  if (dropped) *dropped = b - anchors;
  if (anchors == 0) throw DataError("supcon: no item has an in-batch positive");

  const double inv = 1.0 / static_cast<double>(anchors);
  for (double& c : coeff) c *= inv;
  return MakeOp(
      Tensor::Scalar(total * inv), {z},
      [z, coeff = std::move(coeff), b, e, temperature](
          const Tensor& g, std::span<Tensor* const> out) {
        const Tensor& zv = z.value();
        Tensor& gz = *out[0];
        const double scale = g[0] / temperature;
        for (std::size_t i = 0; i < b; ++i) {
          for (std::size_t j = 0; j < b; ++j) {
            const double c = coeff[i * b + j] * scale;
            if (c == 0.0) continue;
            // d s_ij / d z_i = z_j / tau and d s_ij / d z_j = z_i / tau.
            for (std::size_t k = 0; k < e; ++k) {
              gz[i * e + k] += c * zv[j * e + k];
              gz[j * e + k] += c * zv[i * e + k];
            }
          }
        }
      });
}

Var LanguageCrossEntropy(const Var& logits, std::span<const int> labels) {
  const Tensor& x = logits.value();
  if (x.rank() != 2) throw ShapeError("cross-entropy: expected B x C logits");
  const std::size_t b = x.rows(), c = x.cols();
  if (labels.size() != b) {
    throw ShapeError("cross-entropy: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(b) + " rows");
  }
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= c) {
      throw DataError("cross-entropy: label " + std::to_string(l) +
                      " outside [0, " + std::to_string(c) + ")");
    }
  }
  std::vector<double> probs(b * c);
  double total = 0.0;
  const std::vector<char> all(c, 1);
  for (std::size_t i = 0; i < b; ++i) {
    std::span<const double> row(&x[i * c], c);
    const double lse = LogSumExp(row, all);
    total += lse - row[labels[i]];
    for (std::size_t k = 0; k < c; ++k) probs[i * c + k] = std::exp(row[k] - lse);
  }
  std::vector<int> lab(labels.begin(), labels.end());
  return MakeOp(Tensor::Scalar(total / static_cast<double>(b)), {logits},
                [probs = std::move(probs), lab = std::move(lab), b, c](
                    const Tensor& g, std::span<Tensor* const> out) {
                  const double scale = g[0] / static_cast<double>(b);
                  for (std::size_t i = 0; i < b; ++i) {
                    for (std::size_t k = 0; k < c; ++k) {
                      double d = probs[i * c + k];
                      if (static_cast<int>(k) == lab[i]) d -= 1.0;
                      (*out[0])[i * c + k] += scale * d;
                    }
                  }
                });
}

double LambdaAt(std::int64_t step, const LossConfig& config) {
  if (step < 0) throw DataError("lambda_at: negative step");
  if (step < config.warmup_steps) return 0.0;
  const std::int64_t into_ramp = step - config.warmup_steps;
  if (into_ramp >= config.ramp_steps) return config.lambda_max;
  return config.lambda_max * static_cast<double>(into_ramp) /
         static_cast<double>(config.ramp_steps);
}

Var TotalLoss(const Var& spk, const Var& lang, double lang_weight) {
  if (spk.value().size() != 1 || lang.value().size() != 1) {
    throw ShapeError("total_loss: both losses must be scalars");
  }
  if (!std::isfinite(spk.value().item()) ||
      !std::isfinite(lang.value().item()) || !std::isfinite(lang_weight)) {
    throw NumericalError("total_loss: non-finite input");
  }
  if (lang_weight < 0.0) throw DataError("total_loss: negative weight");
  return Add(spk, Scale(lang, lang_weight));
}

}  // namespace langadv
