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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langadv/model.hpp"
#include "langadv/objective.hpp"
#include "langadv/rng.hpp"
#include "langadv/tensor.hpp"

namespace langadv {

inline constexpr std::array<std::string_view, 4> kLanguages = {"en", "hi",
                                                               "te", "ta"};

// Index of `lang` in kLanguages; throws DataError for unknown symbols.
int LanguageIndex(std::string_view lang);

struct Clip {
  std::string clip_id;
  std::string voice;
  std::string lang;
  Tensor frames;  // T x D
  double duration_s = 0.0;
  // Unrecognized record fields, kept verbatim (serialized JSON object).
  std::string extra_json;

  friend bool operator==(const Clip&, const Clip&) = default;
};

struct Corpus {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t feature_dim = 0;
  std::vector<Clip> clips;
  // Generator parameters and other manifest fields (serialized JSON object).
  std::string manifest_extra_json = "{}";

  // Shared feature_dim, unique ids, T >= 1, positive durations, known
  // languages.
  void Validate() const;
  // Distinct voices in sorted order.
  std::vector<std::string> Voices() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct SynthConfig {
  std::size_t num_voices = 8;
  std::size_t clips_per_voice_per_lang = 50;
  std::size_t feature_dim = 768;
  std::size_t frames_min = 4;
  std::size_t frames_max = 12;
  double speaker_scale = 1.0;
  double language_scale = 0.5;
  double noise_scale = 0.1;
  double duration_min_s = 2.0;
  double duration_max_s = 8.0;
  std::uint64_t seed = 1337;

  void Validate() const;
};

// Frames are speaker_scale * s_voice + language_scale * u_lang + noise per
// frame, with s and u orthonormal and noise ~ noise_scale * N(0, I / D) so
// its expected norm is noise_scale regardless of D. Durations are rounded to
// milliseconds. Clip ids are "<voice>_<lang>_<index>".
Corpus GenerateSynthetic(const SynthConfig& config);

struct GateCounts {
  std::size_t passed = 0;
  std::size_t total = 0;
};

struct GateReport {
  double threshold = 0.0;
  // Keyed by (voice, lang).
  std::map<std::pair<std::string, std::string>, GateCounts> cells;
  std::size_t passed = 0;
  std::size_t total = 0;

  double PassRate() const;
};

struct GateResult {
  Corpus passed;
  GateReport report;
};

using ClipEncoder = std::function<Embedding(const Clip&)>;

// Keeps a clip iff cosine(embedding, reference) >= threshold, the reference
// being the voice's first English clip in clip_id order (always kept).
GateResult QualityGate(const Corpus& corpus, const ClipEncoder& encoder,
                       double threshold);

// "0.70" for 1118 / 1600.
std::string FormatRate(double rate);
// "69.88%" for 1118 / 1600.
std::string FormatPercent(double rate);
std::string GateReportToJson(const GateReport& report);

struct Batch {
  std::vector<std::size_t> clip_indices;
  BatchLabels labels;
};

// Picks voices_per_batch distinct voices uniformly, then
// batch_size / voices_per_batch clips per voice without replacement.
// Voice ids in the labels index Corpus::Voices().
Batch SampleBatch(const Corpus& corpus, std::size_t batch_size,
                  std::size_t voices_per_batch, Rng& rng);

// Newline-delimited JSON: a manifest record then one record per clip.
void WriteCorpus(const Corpus& corpus, const std::string& path);
Corpus ReadCorpus(const std::string& path);
std::string CorpusToString(const Corpus& corpus);
Corpus CorpusFromString(const std::string& text);

// Normalized mean-pooled raw frames.
Embedding PassThroughEmbed(const Clip& clip);

}  // namespace langadv
