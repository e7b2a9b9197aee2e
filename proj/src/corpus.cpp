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

#include "langadv/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "langadv/error.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/io.hpp"

namespace langadv {

using json = nlohmann::json;

int LanguageIndex(std::string_view lang) {
  for (std::size_t i = 0; i < kLanguages.size(); ++i) {
    if (kLanguages[i] == lang) return static_cast<int>(i);
  }
  throw DataError("unknown language symbol '" + std::string(lang) + "'");
}

void Corpus::Validate() const {
  std::set<std::string> ids;
  for (const Clip& c : clips) {
    if (!ids.insert(c.clip_id).second) {
      throw DataError("duplicate clip_id '" + c.clip_id + "'");
    }
    if (c.frames.rank() != 2 || c.frames.rows() < 1) {
      throw DataError("clip '" + c.clip_id + "' has no frames");
    }
    if (c.frames.cols() != feature_dim) {
      throw DataError("clip '" + c.clip_id + "' has feature dim " +
                      std::to_string(c.frames.cols()) + ", corpus has " +
                      std::to_string(feature_dim));
    }
    if (!(c.duration_s > 0.0)) {
      throw DataError("clip '" + c.clip_id + "' has non-positive duration");
    }
    LanguageIndex(c.lang);
  }
}

std::vector<std::string> Corpus::Voices() const {
  std::set<std::string> v;
  for (const Clip& c : clips) v.insert(c.voice);
  return {v.begin(), v.end()};
}

void SynthConfig::Validate() const {
  if (num_voices < 1) throw DataError("num_voices must be >= 1");
  if (clips_per_voice_per_lang < 1) {
    throw DataError("clips_per_voice_per_lang must be >= 1");
  }
  if (feature_dim < num_voices + kLanguages.size()) {
    throw DataError("feature_dim " + std::to_string(feature_dim) +
                    " too small to orthogonalize " +
                    std::to_string(num_voices) + " voice and " +
                    std::to_string(kLanguages.size()) +
                    " language directions");
  }
  if (frames_min < 1 || frames_max < frames_min) {
    throw DataError("frames range must satisfy 1 <= min <= max");
  }
  if (!(speaker_scale > 0.0)) throw DataError("speaker_scale must be > 0");
  if (!(language_scale >= 0.0)) throw DataError("language_scale must be >= 0");
  if (!(noise_scale >= 0.0)) throw DataError("noise_scale must be >= 0");
  if (!(duration_min_s > 0.0) || duration_max_s < duration_min_s) {
    throw DataError("duration range must satisfy 0 < min <= max");
  }
}

namespace {

// Gram-Schmidt (two passes) over Gaussian draws.
std::vector<std::vector<double>> OrthonormalDirections(std::size_t count,
                                                       std::size_t dim,
                                                       Rng& rng) {
  std::vector<std::vector<double>> dirs;
  while (dirs.size() < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.Normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& d : dirs) {
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += v[k] * d[k];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= dot * d[k];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;  // Degenerate draw; redraw.
    for (double& x : v) x /= norm;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

std::string ZeroPad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::size_t Digits(std::size_t n) {
  return std::to_string(n > 0 ? n - 1 : 0).size();
}

}  // namespace

Corpus GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  const std::size_t dim = config.feature_dim;
  const auto dirs =
      OrthonormalDirections(config.num_voices + kLanguages.size(), dim, rng);
  const double noise_std = config.noise_scale / std::sqrt(static_cast<double>(dim));

  Corpus corpus;
  corpus.name = "synthetic";
  corpus.seed = config.seed;
  corpus.feature_dim = dim;
  const std::size_t voice_width = std::max<std::size_t>(2, Digits(config.num_voices));
  const std::size_t clip_width =
      std::max<std::size_t>(3, Digits(config.clips_per_voice_per_lang));
  for (std::size_t v = 0; v < config.num_voices; ++v) {
    const std::string voice = "voice" + ZeroPad(v, voice_width);
    const auto& s = dirs[v];
    for (std::size_t l = 0; l < kLanguages.size(); ++l) {
      const auto& u = dirs[config.num_voices + l];
      const std::string lang(kLanguages[l]);
      for (std::size_t i = 0; i < config.clips_per_voice_per_lang; ++i) {
        const auto t = static_cast<std::size_t>(
            rng.UniformInt(static_cast<std::int64_t>(config.frames_min),
                           static_cast<std::int64_t>(config.frames_max)));
        Tensor frames({t, dim}, 0.0);
        for (std::size_t r = 0; r < t; ++r) {
          for (std::size_t k = 0; k < dim; ++k) {
            double x = config.speaker_scale * s[k] + config.language_scale * u[k];
            if (noise_std > 0.0) x += noise_std * rng.Normal();
            frames[r * dim + k] = x;
          }
        }
        const double dur =
            std::round(rng.Uniform(config.duration_min_s, config.duration_max_s) *
                       1000.0) /
            1000.0;
        corpus.clips.push_back(Clip{voice + "_" + lang + "_" + ZeroPad(i, clip_width),
                                    voice, lang, std::move(frames),
                                    std::max(dur, 0.001), "{}"});
      }
    }
  }
  json gen = {{"num_voices", config.num_voices},
              {"clips_per_voice_per_lang", config.clips_per_voice_per_lang},
              {"feature_dim", config.feature_dim},
              {"frames_range", {config.frames_min, config.frames_max}},
              {"speaker_scale", config.speaker_scale},
              {"language_scale", config.language_scale},
              {"noise_scale", config.noise_scale},
              {"duration_range_s", {config.duration_min_s, config.duration_max_s}},
              {"seed", config.seed}};
  corpus.manifest_extra_json = json{{"generator", gen}}.dump();
  return corpus;
}

double GateReport::PassRate() const {
  return total == 0 ? 0.0
                    : static_cast<double>(passed) / static_cast<double>(total);
}

GateResult QualityGate(const Corpus& corpus, const ClipEncoder& encoder,
                       double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw DataError("gate threshold must be in [-1, 1]");
  }
  // Reference clip per voice: first English clip_id.
  std::map<std::string, std::size_t> reference;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const Clip& c = corpus.clips[i];
    if (c.lang != "en") continue;
    auto it = reference.find(c.voice);
    if (it == reference.end() || c.clip_id < corpus.clips[it->second].clip_id) {
      reference[c.voice] = i;
    }
  }
  for (const std::string& v : corpus.Voices()) {
    if (!reference.count(v)) {
      throw DataError("voice '" + v + "' has no English clip to gate against");
    }
  }
  std::map<std::string, Embedding> ref_emb;
  for (const auto& [voice, idx] : reference) {
    ref_emb[voice] = encoder(corpus.clips[idx]);
  }

  GateResult result;
  result.passed = corpus;
  result.passed.clips.clear();
  result.report.threshold = threshold;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const Clip& c = corpus.clips[i];
    bool keep = i == reference[c.voice];
    if (!keep) {
      const Embedding e = encoder(c);
      keep = Cosine(e.vector, ref_emb[c.voice].vector) >= threshold;
    }
    GateCounts& cell = result.report.cells[{c.voice, c.lang}];
    ++cell.total;
    ++result.report.total;
    if (keep) {
      ++cell.passed;
      ++result.report.passed;
      result.passed.clips.push_back(c);
    }
  }
  json extra = json::parse(corpus.manifest_extra_json);
  extra["gate_threshold"] = threshold;
  result.passed.manifest_extra_json = extra.dump();
  return result;
}

std::string FormatRate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate);
  return buf;
}

std::string FormatPercent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * rate);
  return buf;
}

std::string GateReportToJson(const GateReport& report) {
  json cells = json::array();
  for (const auto& [key, counts] : report.cells) {
    cells.push_back({{"voice", key.first},
                     {"lang", key.second},
                     {"passed", counts.passed},
                     {"total", counts.total}});
  }
  json j = {{"threshold", report.threshold},
            {"passed", report.passed},
            {"total", report.total},
            {"pass_rate", FormatRate(report.PassRate())},
            {"pass_percent", FormatPercent(report.PassRate())},
            {"cells", cells}};
  return j.dump(2);
}

Batch SampleBatch(const Corpus& corpus, std::size_t batch_size,
                  std::size_t voices_per_batch, Rng& rng) {
  if (voices_per_batch < 2) {
    throw DataError("voices_per_batch must be >= 2 to provide negatives");
  }
  if (batch_size % voices_per_batch != 0) {
    throw DataError("batch_size must be divisible by voices_per_batch");
  }
  const std::size_t per_voice = batch_size / voices_per_batch;
  if (per_voice < 2) {
    throw DataError("need at least two clips per voice to provide positives");
  }
  const std::vector<std::string> voices = corpus.Voices();
  std::map<std::string, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    pools[corpus.clips[i].voice].push_back(i);
  }
  std::vector<std::size_t> eligible;
  for (std::size_t v = 0; v < voices.size(); ++v) {
    if (pools[voices[v]].size() >= per_voice) eligible.push_back(v);
  }
  if (eligible.size() < voices_per_batch) {
    throw DataError("corpus too small: need " +
                    std::to_string(voices_per_batch) + " voices with >= " +
                    std::to_string(per_voice) + " clips, have " +
                    std::to_string(eligible.size()));
  }
  Batch batch;
  for (std::size_t pick :
       rng.SampleWithoutReplacement(eligible.size(), voices_per_batch)) {
    const std::size_t v = eligible[pick];
    const auto& pool = pools[voices[v]];
    for (std::size_t c : rng.SampleWithoutReplacement(pool.size(), per_voice)) {
      const std::size_t idx = pool[c];
      batch.clip_indices.push_back(idx);
      batch.labels.voice_ids.push_back(static_cast<int>(v));
      batch.labels.language_ids.push_back(LanguageIndex(corpus.clips[idx].lang));
    }
  }
  return batch;
}

namespace {

const std::set<std::string> kClipFields = {"clip_id", "voice", "lang",
                                           "duration_s", "frames"};
const std::set<std::string> kManifestFields = {"type", "name", "seed",
                                               "feature_dim", "num_clips"};

json ClipToJson(const Clip& c) {
  json j = c.extra_json.empty() ? json::object() : json::parse(c.extra_json);
  j["clip_id"] = c.clip_id;
  j["voice"] = c.voice;
  j["lang"] = c.lang;
  j["duration_s"] = c.duration_s;
  json frames = json::array();
  for (std::size_t r = 0; r < c.frames.rows(); ++r) {
    auto row = c.frames.row(r);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["frames"] = std::move(frames);
  return j;
}

Clip ClipFromJson(const json& j, std::size_t line) {
  auto where = [&] { return " (line " + std::to_string(line) + ")"; };
  try {
    Clip c;
    c.clip_id = j.at("clip_id").get<std::string>();
    c.voice = j.at("voice").get<std::string>();
    c.lang = j.at("lang").get<std::string>();
    c.duration_s = j.at("duration_s").get<double>();
    const auto rows = j.at("frames").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw DataError("clip has no frames" + where());
    c.frames = Tensor::FromRows(rows);
    json extra = json::object();
    for (const auto& [k, v] : j.items()) {
      if (!kClipFields.count(k)) extra[k] = v;
    }
    c.extra_json = extra.dump();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed clip record: ") + e.what() + where());
  } catch (const ShapeError& e) {
    throw DataError(std::string("malformed frames: ") + e.what() + where());
  }
}

}  // namespace

std::string CorpusToString(const Corpus& corpus) {
  json manifest =
      corpus.manifest_extra_json.empty() ? json::object()
                                         : json::parse(corpus.manifest_extra_json);
  manifest["type"] = "manifest";
  manifest["name"] = corpus.name;
  manifest["seed"] = corpus.seed;
  manifest["feature_dim"] = corpus.feature_dim;
  manifest["num_clips"] = corpus.clips.size();
  std::string out = manifest.dump();
  out += '\n';
  for (const Clip& c : corpus.clips) {
    out += ClipToJson(c).dump();
    out += '\n';
  }
  return out;
}

Corpus CorpusFromString(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Corpus corpus;
  bool have_manifest = false;
  std::optional<std::size_t> declared_clips;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("corpus line " + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    if (!have_manifest) {
      try {
        if (j.value("type", "") != "manifest") {
          throw DataError("corpus line 1: expected a manifest record");
        }
        corpus.name = j.value("name", "");
        corpus.seed = j.value("seed", std::uint64_t{0});
        corpus.feature_dim = j.at("feature_dim").get<std::size_t>();
        if (j.contains("num_clips")) {
          declared_clips = j.at("num_clips").get<std::size_t>();
        }
      } catch (const json::exception& e) {
        throw DataError(std::string("corpus manifest: ") + e.what());
      }
      json extra = json::object();
      for (const auto& [k, v] : j.items()) {
        if (!kManifestFields.count(k)) extra[k] = v;
      }
      corpus.manifest_extra_json = extra.dump();
      have_manifest = true;
      continue;
    }
    corpus.clips.push_back(ClipFromJson(j, line_no));
  }
  if (!have_manifest) throw DataError("corpus: empty file");
  if (declared_clips && *declared_clips != corpus.clips.size()) {
    throw DataError("corpus manifest declares " +
                    std::to_string(*declared_clips) + " clips but " +
                    std::to_string(corpus.clips.size()) + " were read");
  }
  corpus.Validate();
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::string& path) {
  WriteFileAtomic(path, CorpusToString(corpus));
}

Corpus ReadCorpus(const std::string& path) {
  return CorpusFromString(ReadFile(path));
}

Embedding PassThroughEmbed(const Clip& clip) {
  Tensor pooled = MeanPool(clip.frames);
  double ss = 0.0;
  for (double x : pooled.data()) ss += x * x;
  const double norm = std::max(std::sqrt(ss), kNormFloor);
  std::vector<double> v(pooled.data().begin(), pooled.data().end());
  for (double& x : v) x /= norm;
  return {std::move(v), true};
}

}  // namespace langadv
