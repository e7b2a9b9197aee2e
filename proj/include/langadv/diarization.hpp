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

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "langadv/corpus.hpp"
#include "langadv/rng.hpp"

namespace langadv {

struct Segment {
  std::string conversation_id;
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string clip_id;
  std::string voice;
  std::string lang;
};

struct Conversation {
  std::string id;
  std::vector<Segment> segments;  // ordered by onset, non-overlapping
  std::size_t num_speakers = 0;

  double EndTime() const;
};

struct BenchmarkOptions {
  std::size_t num_conversations = 50;
  std::size_t min_speakers = 2;
  std::size_t max_speakers = 4;
  std::size_t min_segments = 6;
  std::size_t max_segments = 10;
  double gap_s = 0.3;
  // Probability that one speaker in a conversation switches language.
  double code_switch_prob = 0.5;
};

// Conversations "conv000", "conv001", ... Speakers are drawn without
// replacement, every speaker gets at least one segment, and a clip is never
// reused within a conversation. Non-switching speakers stay in one language;
// a switching speaker's segments use two languages, the first half in one
// and the rest in the other.
std::vector<Conversation> BuildBenchmark(const Corpus& corpus,
                                         const BenchmarkOptions& options,
                                         Rng& rng);

// Average-linkage agglomerative clustering under cosine distance, merged
// down to exactly k clusters. Ties go to the lexicographically smallest
// (i, j) pair of current cluster positions; a merge keeps position i.
// Labels number the final clusters by their smallest member index.
std::vector<int> AgglomerativeCluster(
    const std::vector<std::vector<double>>& embeddings, std::size_t k);

// Contingency-table ARI. 1.0 when the denominator vanishes (both
// partitions all-singletons or both a single cluster).
double AdjustedRandIndex(const std::vector<int>& predicted,
                         const std::vector<int>& truth);

struct CrossScriptRecall {
  double recall = 1.0;
  std::size_t cross_segments = 0;
  std::size_t hits = 0;
  std::size_t qualifying_speakers = 0;
  bool vacuous = true;  // no speaker appeared in two or more languages
};

// `predicted[c][s]` is the cluster label of segment s of conversation c.
CrossScriptRecall ComputeCrossScriptRecall(
    const std::vector<Conversation>& conversations,
    const std::vector<std::vector<int>>& predicted);

// One line per segment:
// SPEAKER <conv> 1 <onset> <duration> <NA> <NA> <voice> <NA> <NA>
std::string RttmToString(const std::vector<Conversation>& conversations);
void WriteRttm(const std::vector<Conversation>& conversations,
               const std::string& path);

struct RttmEntry {
  std::string conversation_id;
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string voice;
};

// Parses the shape written above, tolerating extra whitespace. Errors name
// the offending line.
std::vector<RttmEntry> ParseRttm(const std::string& text);
std::vector<RttmEntry> ReadRttm(const std::string& path);

// Ground-truth labels: index of each segment's voice in order of first
// appearance.
std::vector<int> TruthLabels(const Conversation& conversation);

struct DiarReport {
  std::string encoder_name;
  std::vector<std::string> conversation_ids;
  std::vector<double> ari;
  double ari_mean = 0.0;
  double ari_median = 0.0;
  CrossScriptRecall cs;
  std::size_t num_conversations = 0;
  std::size_t num_segments = 0;
  double total_minutes = 0.0;
};

using SegmentEmbedder = std::function<std::vector<double>(const Segment&)>;

// Embeds segments, clusters each conversation with its true speaker count
// and scores ARI and cross-script recall. Fills `predicted` when given.
DiarReport RunDiarEval(const std::string& encoder_name,
                       const std::vector<Conversation>& conversations,
                       const SegmentEmbedder& embed,
                       std::vector<std::vector<int>>* predicted = nullptr);

std::string DiarReportToJson(const DiarReport& report);
// `encoder  ari_mean  ari_median  cs_recall`
std::string FormatDiarRow(const DiarReport& report);
std::string DiarTableHeader();

// One JSON record per segment: conversation_id, segment, label.
std::string PredictedLabelsToJsonl(
    const std::vector<Conversation>& conversations,
    const std::vector<std::vector<int>>& predicted);

}  // namespace langadv
