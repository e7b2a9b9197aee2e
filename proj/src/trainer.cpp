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

#include "langadv/trainer.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "langadv/error.hpp"

namespace langadv {

void TrainConfig::Validate() const {
  if (steps < 1) throw DataError("steps must be >= 1");
  model.Validate();
  loss.Validate();
  optim.Validate();
}

TrainState InitTrainState(const TrainConfig& config) {
  config.Validate();
  Rng master(config.seed);
  Rng init_rng = master.Split();
  Rng sampler = master.Split();
  Rng dropout = master.Split();
  TrainState state;
  state.params = InitParams(config.model, init_rng);
  const auto all = state.params.All();
  std::vector<const Tensor*> cptrs(all.begin(), all.end());
  state.optim = OptimState::ZerosLike(cptrs);
  state.sampler_rng_state = sampler.state();
  state.dropout_rng_state = dropout.state();
  return state;
}

namespace {

Tensor PooledMatrix(const std::vector<Tensor>& pooled,
                    const std::vector<std::size_t>& indices, std::size_t dim) {
  Tensor x({indices.size(), dim}, 0.0);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Tensor& p = pooled[indices[r]];
    std::copy(p.data().begin(), p.data().end(), x.row(r).begin());
  }
  return x;
}

}  // namespace

void ContinueTraining(const Corpus& corpus, const TrainConfig& config,
                      TrainState& state, std::int64_t until_step) {
  config.Validate();
  state.params.CheckShapes(config.model);
  if (corpus.feature_dim != config.model.input_dim) {
    throw DataError("corpus feature_dim " + std::to_string(corpus.feature_dim) +
                    " does not match model input_dim " +
                    std::to_string(config.model.input_dim));
  }
  if (config.model.num_languages < kLanguages.size()) {
    throw DataError("model must classify all corpus languages");
  }

  std::vector<Tensor> pooled;
  pooled.reserve(corpus.clips.size());
  for (const Clip& c : corpus.clips) pooled.push_back(MeanPool(c.frames));

  Rng sampler(state.sampler_rng_state);
  Rng dropout(state.dropout_rng_state);
  const std::vector<bool> decay = ModelParams::DecayMask();
  const std::size_t head_n = ModelParams::kNumHeadTensors;

  for (; state.step < until_step; ++state.step) {
    const std::int64_t step = state.step;
    const Batch batch = SampleBatch(corpus, config.batch_size,
                                    config.voices_per_batch, sampler);
    const double lambda = LambdaAt(step, config.loss);

    double clip_scale = 1.0;
    Var l_spk, l_lang;
    try {
      const ModelVars vars = config.freeze_classifier
                                 ? ModelVars::FrozenClassifier(state.params)
                                 : ModelVars::Trainable(state.params);
      Var x = Constant(PooledMatrix(pooled, batch.clip_indices, corpus.feature_dim));
      Var z = ProjectPooled(vars, config.model, x, true, &dropout);
      l_spk = SupConLoss(z, batch.labels.voice_ids, config.loss.temperature);
      Var logits = ClassifyLanguage(vars, config.model, GradientReversal(z, lambda));
      l_lang = LanguageCrossEntropy(logits, batch.labels.language_ids);
      const double weight = config.loss.unit_lang_weight ? 1.0 : lambda;
      Var total = TotalLoss(l_spk, l_lang, weight);
      if (!std::isfinite(total.value().item())) {
        throw NumericalError("non-finite loss at step " + std::to_string(step));
      }
      Backward(total);

      const std::vector<Var> leaves = vars.All();
      std::vector<Tensor> grads;
      grads.reserve(leaves.size());
      for (const Var& v : leaves) grads.push_back(v.grad());
      for (const Tensor& g : grads) {
        if (!g.AllFinite()) {
          throw NumericalError("non-finite gradient at step " +
                               std::to_string(step));
        }
      }

      std::vector<Tensor*> clip_set;
      for (Tensor& g : grads) clip_set.push_back(&g);
      clip_scale = ClipGlobalNorm(clip_set, config.optim.clip_norm);

      std::vector<Tensor*> params = state.params.All();
      std::vector<const Tensor*> gptrs;
      for (const Tensor& g : grads) gptrs.push_back(&g);
      if (config.freeze_classifier) {
        // Step only the head; the classifier's moments stay at zero.
        OptimState head_state;
        head_state.m.assign(state.optim.m.begin(), state.optim.m.begin() + head_n);
        head_state.v.assign(state.optim.v.begin(), state.optim.v.begin() + head_n);
        head_state.step_count = state.optim.step_count;
        AdamWStep(std::span(params).first(head_n), std::span(gptrs).first(head_n),
                  std::vector<bool>(decay.begin(), decay.begin() + head_n),
                  head_state, config.optim);
        for (std::size_t i = 0; i < head_n; ++i) {
          state.optim.m[i] = std::move(head_state.m[i]);
          state.optim.v[i] = std::move(head_state.v[i]);
        }
        state.optim.step_count = head_state.step_count;
      } else {
        AdamWStep(params, gptrs, decay, state.optim, config.optim);
      }
    } catch (const NumericalError& e) {
      const std::string what = e.what();
      if (what.find("at step") != std::string::npos) throw;
      throw NumericalError(what + " (at step " + std::to_string(step) + ")");
    }

    state.history.push_back(TrainRecord{step, l_spk.value().item(),
                                        l_lang.value().item(), lambda,
                                        clip_scale});
  }
  state.sampler_rng_state = sampler.state();
  state.dropout_rng_state = dropout.state();
}

TrainState Train(const Corpus& corpus, const TrainConfig& config) {
  TrainState state = InitTrainState(config);
  ContinueTraining(corpus, config, state, config.steps);
  return state;
}

EmbeddingTable EvaluateEmbeddings(const ModelParams& params,
                                  const ModelConfig& config,
                                  const Corpus& corpus) {
  if (corpus.feature_dim != config.input_dim) {
    throw DataError("corpus feature_dim " + std::to_string(corpus.feature_dim) +
                    " does not match model input_dim " +
                    std::to_string(config.input_dim));
  }
  params.CheckShapes(config);
  EmbeddingTable table;
  for (const Clip& c : corpus.clips) {
    table.emplace(c.clip_id, Embed(params, config, c.frames));
  }
  return table;
}

EmbeddingTable PassThroughEmbeddings(const Corpus& corpus) {
  EmbeddingTable table;
  for (const Clip& c : corpus.clips) table.emplace(c.clip_id, PassThroughEmbed(c));
  return table;
}

namespace {

ModelVars VarsFromLeaves(std::span<const Var> leaves) {
  return {leaves[0], leaves[1], leaves[2], leaves[3],
          leaves[4], leaves[5], leaves[6], leaves[7]};
}

}  // namespace

GradCheckResult ModelGradCheck(const ModelConfig& config, std::uint64_t seed,
                               const ModelGradCheckOptions& options) {
  ModelConfig cfg = config;
  cfg.dropout_rate = 0.0;
  cfg.Validate();
  if (options.batch_size < 4 || options.batch_size % 2 != 0) {
    throw DataError("grad check batch size must be even and >= 4");
  }
  Rng rng(seed);
  Rng init_rng = rng.Split();
  const ModelParams params = InitParams(cfg, init_rng);

  // Pooled random frames in [-1, 1]; voices alternate in pairs.
  Tensor pooled({options.batch_size, cfg.input_dim}, 0.0);
  BatchLabels labels;
  for (std::size_t b = 0; b < options.batch_size; ++b) {
    Tensor frames({options.frames_per_clip, cfg.input_dim}, 0.0);
    for (double& x : frames.data()) x = rng.Uniform(-1.0, 1.0);
    const Tensor p = MeanPool(frames);
    std::copy(p.data().begin(), p.data().end(), pooled.row(b).begin());
    labels.voice_ids.push_back(static_cast<int>(b / 2 % 2));
    labels.language_ids.push_back(
        static_cast<int>(b % cfg.num_languages));
  }
  const double lambda = options.lambda;

  auto losses = [&](std::span<const Var> leaves, bool reversed) {
    const ModelVars vars = VarsFromLeaves(leaves);
    Var z = ProjectPooled(vars, cfg, Constant(pooled), false, nullptr);
    Var spk = SupConLoss(z, labels.voice_ids, 0.07);
    Var head_in = reversed ? GradientReversal(z, lambda) : z;
    Var lang = LanguageCrossEntropy(ClassifyLanguage(vars, cfg, head_in),
                                    labels.language_ids);
    return std::pair{spk, lang};
  };
  const ScalarFn analytic = [&](std::span<const Var> leaves) {
    auto [spk, lang] = losses(leaves, true);
    return TotalLoss(spk, lang, 1.0);
  };
  const NumericFn numeric = [&](std::span<const Var> leaves, std::size_t pi) {
    auto [spk, lang] = losses(leaves, false);
    const double w = pi < ModelParams::kNumHeadTensors ? -lambda : 1.0;
    return spk.value().item() + w * lang.value().item();
  };
  std::vector<Tensor> tensors;
  for (const Tensor* t : params.All()) tensors.push_back(*t);
  return GradCheck(analytic, numeric, tensors, options.check);
}

std::string HistoryToJsonl(const std::vector<TrainRecord>& history) {
  std::string out;
  for (const TrainRecord& r : history) {
    nlohmann::json j = {{"step", r.step},
                        {"l_spk", r.l_spk},
                        {"l_lang", r.l_lang},
                        {"lambda", r.lambda},
                        {"clip_scale", r.clip_scale}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrainRecord> HistoryFromJsonl(const std::string& text) {
  std::vector<TrainRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back(TrainRecord{j.at("step").get<std::int64_t>(),
                                j.at("l_spk").get<double>(),
                                j.at("l_lang").get<double>(),
                                j.at("lambda").get<double>(),
                                j.at("clip_scale").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError("history line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

}  // namespace langadv
