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
#include <map>
#include <string>
#include <vector>

#include "langadv/corpus.hpp"
#include "langadv/model.hpp"
#include "langadv/objective.hpp"
#include "langadv/optimizer.hpp"

namespace langadv {

struct TrainConfig {
  std::int64_t steps = 1000;
  std::size_t batch_size = 16;
  std::size_t voices_per_batch = 4;
  std::uint64_t seed = 1337;
  ModelConfig model;
  LossConfig loss;
  OptimConfig optim;
  // Keeps the language classifier at its initial weights. Used to check that
  // the adversary cannot move the projection head while lambda is zero.
  bool freeze_classifier = false;

  void Validate() const;
};

struct TrainRecord {
  std::int64_t step = 0;
  double l_spk = 0.0;
  double l_lang = 0.0;  // raw cross-entropy, before any weighting
  double lambda = 0.0;
  double clip_scale = 1.0;

  friend bool operator==(const TrainRecord&, const TrainRecord&) = default;
};

struct TrainState {
  ModelParams params;
  OptimState optim;
  std::int64_t step = 0;
  std::vector<TrainRecord> history;
  std::uint64_t sampler_rng_state = 0;
  std::uint64_t dropout_rng_state = 0;
};

// Fresh parameters and optimizer state, rng streams derived from the seed.
TrainState InitTrainState(const TrainConfig& config);

// Runs steps [state.step, until_step). Deterministic given the state; a run
// split across several calls is bit-identical to a single call.
void ContinueTraining(const Corpus& corpus, const TrainConfig& config,
                      TrainState& state, std::int64_t until_step);

// InitTrainState + ContinueTraining(config.steps).
TrainState Train(const Corpus& corpus, const TrainConfig& config);

using EmbeddingTable = std::map<std::string, Embedding>;

// Evaluation-mode embeddings for every clip, keyed (and ordered) by clip_id.
EmbeddingTable EvaluateEmbeddings(const ModelParams& params,
                                  const ModelConfig& config,
                                  const Corpus& corpus);
EmbeddingTable PassThroughEmbeddings(const Corpus& corpus);

struct ModelGradCheckOptions {
  std::size_t batch_size = 4;  // two voices x two clips
  std::size_t frames_per_clip = 3;
  double lambda = 0.1;
  GradCheckOptions check;
};

// Finite-difference check of the full training graph (projection head,
// gradient reversal, classifier, contrastive + cross-entropy) at a random
// initialization with dropout disabled. Head tensors are differenced
// against L_spk - lambda * L_lang, classifier tensors against
// L_spk + L_lang, which is what the reversed graph differentiates.
GradCheckResult ModelGradCheck(const ModelConfig& config, std::uint64_t seed,
                               const ModelGradCheckOptions& options = {});

// One JSON record per line: step, l_spk, l_lang, lambda, clip_scale.
std::string HistoryToJsonl(const std::vector<TrainRecord>& history);
std::vector<TrainRecord> HistoryFromJsonl(const std::string& text);

}  // namespace langadv
