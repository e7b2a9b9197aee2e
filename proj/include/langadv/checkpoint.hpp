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

#include <optional>
#include <string>

#include "langadv/model.hpp"
#include "langadv/optimizer.hpp"
#include "langadv/trainer.hpp"

namespace langadv {

// Binary checkpoint, all integers and reals little-endian:
//
//   "LADV1"                       5-byte magic
//   u32 format_version            currently 1
//   i64 input_dim, hidden_dim, embed_dim, classifier_hidden, num_languages
//   f64 dropout_rate
//   per tensor in ModelParams::All() order:
//     u32 rank, i64 dims[rank], f64 values[numel]
//   optional sections, each introduced by a 4-byte tag:
//     "OPT1": i64 step_count, then m and v tensors per parameter (same
//             encoding as above), m_0, v_0, m_1, v_1, ...
//     "TRN1": i64 step, u64 sampler rng state, u64 dropout rng state
//
// Readers reject unknown magic, versions and tags.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::optional<OptimState> optim;
  struct TrainerSection {
    std::int64_t step = 0;
    std::uint64_t sampler_rng_state = 0;
    std::uint64_t dropout_rng_state = 0;
    friend bool operator==(const TrainerSection&,
                           const TrainerSection&) = default;
  };
  std::optional<TrainerSection> trainer;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);

// Atomic: written to a temporary file and renamed into place.
void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::string& path);

Checkpoint CheckpointFromState(const ModelConfig& config,
                               const TrainState& state);
// Restores a TrainState (history excluded) from a checkpoint with both
// optional sections present.
TrainState StateFromCheckpoint(const Checkpoint& ckpt);

}  // namespace langadv
