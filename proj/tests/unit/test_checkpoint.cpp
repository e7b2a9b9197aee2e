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

#include <filesystem>

#include "langadv/checkpoint.hpp"
#include "langadv/corpus.hpp"
#include "langadv/error.hpp"
#include "langadv/io.hpp"
#include "langadv/trainer.hpp"

using namespace langadv;

namespace {

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

Corpus SmallCorpus() {
  SynthConfig s;
  s.num_voices = 4;
  s.clips_per_voice_per_lang = 3;
  s.feature_dim = 12;
  return GenerateSynthetic(s);
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("params-only round trip is bit exact") {
  Rng rng(1);
  Checkpoint c;
  c.config = SmallTrain(1).model;
  c.config.dropout_rate = 0.25;
  c.params = InitParams(c.config, rng);
  const std::string bytes = SerializeCheckpoint(c);
  CHECK(bytes.substr(0, 5) == "LADV1");
  const Checkpoint back = DeserializeCheckpoint(bytes);
  CHECK(back.config == c.config);
  CHECK(back.params == c.params);
  CHECK_FALSE(back.optim.has_value());
  CHECK_FALSE(back.trainer.has_value());
  CHECK(SerializeCheckpoint(back) == bytes);
}

TEST_CASE("default model size") {
  Rng rng(2);
  Checkpoint c;
  c.params = InitParams(c.config, rng);
  const std::string bytes = SerializeCheckpoint(c);
  // header + rank/dims per tensor + 8 bytes per value
  CHECK(bytes.size() > c.params.ParameterCount() * 8);
  CHECK(DeserializeCheckpoint(bytes).params == c.params);
}

TEST_CASE("corrupt checkpoints are rejected") {
  Rng rng(3);
  Checkpoint c;
  c.config = SmallTrain(1).model;
  c.params = InitParams(c.config, rng);
  const std::string bytes = SerializeCheckpoint(c);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(DeserializeCheckpoint(bad), DataError);
  CHECK_THROWS_AS(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 3)),
                  DataError);
  CHECK_THROWS_AS(DeserializeCheckpoint(bytes + "JUNK"), DataError);
  std::string version = bytes;
  version[5] = 9;
  CHECK_THROWS_AS(DeserializeCheckpoint(version), DataError);
  CHECK_THROWS_AS(ReadCheckpoint("/nonexistent/x.ckpt"), DataError);
}

TEST_CASE("resume is bit identical") {
  const Corpus corpus = SmallCorpus();
  const TrainConfig cfg = SmallTrain(40);
  const TrainState whole = Train(corpus, cfg);

  TrainState first = InitTrainState(cfg);
  ContinueTraining(corpus, cfg, first, 17);
  const std::string path = TempPath("langadv_resume.ckpt");
  WriteCheckpoint(path, CheckpointFromState(cfg.model, first));
  TrainState resumed = StateFromCheckpoint(ReadCheckpoint(path));
  std::filesystem::remove(path);
  CHECK(resumed.step == 17);
  ContinueTraining(corpus, cfg, resumed, 40);
  CHECK(resumed.params == whole.params);
  CHECK(resumed.optim == whole.optim);
  for (std::size_t i = 0; i < 23; ++i) {
    CHECK(resumed.history[i] == whole.history[17 + i]);
  }
}

TEST_CASE("state restore needs the optional sections") {
  Rng rng(4);
  Checkpoint c;
  c.config = SmallTrain(1).model;
  c.params = InitParams(c.config, rng);
  CHECK_THROWS_AS(StateFromCheckpoint(c), DataError);
}

TEST_CASE("atomic write and digest") {
  const std::string path = TempPath("langadv_atomic.txt");
  WriteFileAtomic(path, "abc");
  CHECK(ReadFile(path) == "abc");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);
  // FNV-1a reference values
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(HexDigest("a") == "af63dc4c8601ec8c");
}
