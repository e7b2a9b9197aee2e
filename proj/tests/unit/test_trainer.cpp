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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "langadv/corpus.hpp"
#include "langadv/error.hpp"
#include "langadv/trainer.hpp"

using namespace langadv;

namespace {

Corpus SmallCorpus() {
  SynthConfig s;
  s.num_voices = 4;
  s.clips_per_voice_per_lang = 3;
  s.feature_dim = 12;
  return GenerateSynthetic(s);
}

TrainConfig SmallTrain(std::int64_t steps) {
  TrainConfig t;
  t.steps = steps;
  t.batch_size = 8;
  t.voices_per_batch = 2;
  t.model.input_dim = 12;
  t.model.hidden_dim = 16;
  t.model.embed_dim = 8;
  t.model.classifier_hidden = 6;
  return t;
}

}  // namespace

TEST_CASE("step count validation") {
  const Corpus corpus = SmallCorpus();
  CHECK_THROWS_AS(Train(corpus, SmallTrain(0)), DataError);
  const TrainState s = Train(corpus, SmallTrain(1));
  CHECK(s.history.size() == 1);
  CHECK(s.step == 1);
}

TEST_CASE("training is deterministic") {
  const Corpus corpus = SmallCorpus();
  const TrainState a = Train(corpus, SmallTrain(40));
  const TrainState b = Train(corpus, SmallTrain(40));
  CHECK(a.params == b.params);
  CHECK(a.optim == b.optim);
  CHECK(a.history == b.history);

  TrainConfig other = SmallTrain(40);
  other.seed = 7;
  CHECK_FALSE(Train(corpus, other).params == a.params);
}

TEST_CASE("split runs match a single run") {
  const Corpus corpus = SmallCorpus();
  const TrainConfig cfg = SmallTrain(30);
  const TrainState whole = Train(corpus, cfg);
  TrainState parts = InitTrainState(cfg);
  ContinueTraining(corpus, cfg, parts, 11);
  ContinueTraining(corpus, cfg, parts, 30);
  CHECK(parts.params == whole.params);
  CHECK(parts.history == whole.history);
}

TEST_CASE("history records the schedule") {
  const Corpus corpus = SmallCorpus();
  TrainConfig cfg = SmallTrain(60);
  cfg.loss.warmup_steps = 10;
  cfg.loss.ramp_steps = 20;
  const TrainState s = Train(corpus, cfg);
  REQUIRE(s.history.size() == 60);
  for (std::size_t i = 0; i < s.history.size(); ++i) {
    const TrainRecord& r = s.history[i];
    CHECK(r.step == static_cast<std::int64_t>(i));
    CHECK(r.lambda == LambdaAt(r.step, cfg.loss));
    CHECK(r.clip_scale <= 1.0);
    CHECK(r.clip_scale > 0.0);
    CHECK(std::isfinite(r.l_spk));
    CHECK(std::isfinite(r.l_lang));
  }
  // first step: classifier is at init, roughly uniform
  CHECK(s.history[0].l_lang > 0.5);
}

TEST_CASE("warmup leaves the head independent of the classifier") {
  const Corpus corpus = SmallCorpus();
  TrainConfig cfg = SmallTrain(200);
  const TrainState live = Train(corpus, cfg);
  cfg.freeze_classifier = true;
  const TrainState frozen = Train(corpus, cfg);
  CHECK(live.params.w1 == frozen.params.w1);
  CHECK(live.params.b1 == frozen.params.b1);
  CHECK(live.params.w2 == frozen.params.w2);
  CHECK(live.params.b2 == frozen.params.b2);
  // the classifier did change in the live run
  CHECK_FALSE(live.params.c1 == frozen.params.c1);

  // after warmup they diverge
  cfg.freeze_classifier = false;
  cfg.steps = 260;
  const TrainState live2 = Train(corpus, cfg);
  cfg.freeze_classifier = true;
  const TrainState frozen2 = Train(corpus, cfg);
  CHECK_FALSE(live2.params.w1 == frozen2.params.w1);
}

TEST_CASE("unit language weight trains the classifier during warmup") {
  const Corpus corpus = SmallCorpus();
  TrainConfig cfg = SmallTrain(150);
  const TrainState scaled = Train(corpus, cfg);
  cfg.loss.unit_lang_weight = true;
  const TrainState unit = Train(corpus, cfg);
  CHECK(unit.history[0].l_spk == scaled.history[0].l_spk);
  CHECK(unit.history[0].l_lang == scaled.history[0].l_lang);
  // with lambda = 0 the scaled run only decays the classifier
  double tail_scaled = 0.0, tail_unit = 0.0;
  for (std::size_t i = 130; i < 150; ++i) {
    tail_scaled += scaled.history[i].l_lang;
    tail_unit += unit.history[i].l_lang;
  }
  CHECK(tail_unit < tail_scaled);
  CHECK_FALSE(unit.params.c1 == scaled.params.c1);
}

TEST_CASE("history jsonl round trip") {
  const TrainState s = Train(SmallCorpus(), SmallTrain(5));
  const std::string text = HistoryToJsonl(s.history);
  CHECK(HistoryFromJsonl(text) == s.history);
  CHECK_THROWS_AS(HistoryFromJsonl("{\"step\": 1}\n"), DataError);
}

TEST_CASE("evaluate embeddings") {
  const Corpus corpus = SmallCorpus();
  const TrainConfig cfg = SmallTrain(3);
  const TrainState s = Train(corpus, cfg);
  const EmbeddingTable a = EvaluateEmbeddings(s.params, cfg.model, corpus);
  CHECK(a.size() == corpus.clips.size());
  for (const auto& [id, e] : a) {
    CHECK(e.vector.size() == 8);
    CHECK(e.normalized);
  }
  const EmbeddingTable b = EvaluateEmbeddings(s.params, cfg.model, corpus);
  for (const auto& [id, e] : a) CHECK(b.at(id).vector == e.vector);

  ModelConfig wrong = cfg.model;
  wrong.input_dim = 13;
  CHECK_THROWS(EvaluateEmbeddings(ModelParams{}, wrong, corpus));

  const EmbeddingTable pt = PassThroughEmbeddings(corpus);
  CHECK(pt.size() == corpus.clips.size());
  CHECK(pt.begin()->second.vector.size() == 12);
}

TEST_CASE("corpus and model must agree") {
  TrainConfig cfg = SmallTrain(2);
  cfg.model.input_dim = 10;
  CHECK_THROWS_AS(Train(SmallCorpus(), cfg), DataError);
}

TEST_CASE("non-finite training is reported with the step") {
  Corpus corpus = SmallCorpus();
  for (double& x : corpus.clips[0].frames.data()) x = 1e300;
  for (Clip& c : corpus.clips) {
    for (double& x : c.frames.data()) x *= 1e200;
  }
  try {
    Train(corpus, SmallTrain(3));
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}

TEST_CASE("model gradient check on a small graph") {
  ModelConfig cfg;
  cfg.input_dim = 10;
  cfg.hidden_dim = 8;
  cfg.embed_dim = 6;
  cfg.classifier_hidden = 5;
  const GradCheckResult r = ModelGradCheck(cfg, 3);
  CHECK(r.coords_checked == 10 * 8 + 8 + 8 * 6 + 6 + 6 * 5 + 5 + 5 * 4 + 4);
  CHECK(r.max_relative_error < 1e-5);
}
