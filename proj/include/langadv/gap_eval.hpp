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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "langadv/rng.hpp"

namespace langadv {

// a.b / (max(|a|, 1e-12) * max(|b|, 1e-12)), clamped to [-1, 1].
double Cosine(std::span<const double> a, std::span<const double> b);

enum class PairKind {
  kWithinScript,   // same voice, same language, different clips
  kCrossScript,    // same voice, different language
  kAcrossSpeaker,  // different voice, same language
};

const char* PairKindName(PairKind kind);

struct ClipMeta {
  std::string clip_id;
  std::string voice;
  std::string lang;
};

bool SatisfiesPredicate(const ClipMeta& a, const ClipMeta& b, PairKind kind);

struct PairSample {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // i < j
  std::vector<double> cosines;
  std::size_t available = 0;  // qualifying unordered pairs in total
  bool shortfall = false;     // fewer than requested were available
};

// Draws n distinct qualifying unordered pairs uniformly without replacement
// (all of them, flagged, when fewer exist). `embeddings[i]` belongs to
// `metas[i]`.
PairSample SamplePairs(const std::vector<ClipMeta>& metas,
                       const std::vector<std::vector<double>>& embeddings,
                       PairKind kind, std::size_t n, Rng& rng);

// Even length: mean of the two middle values.
double Median(std::vector<double> values);

// Linear interpolation between order statistics at rank q * (N - 1).
double Percentile(std::vector<double> values, double q);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap of median(a) - median(b), resampling a and b
// independently with replacement at their original sizes.
Interval BootstrapMedianDifference(std::span<const double> a,
                                   std::span<const double> b,
                                   std::size_t iterations, Rng& rng,
                                   double level = 0.95);

struct GapOptions {
  std::size_t n_pairs = 200;
  std::size_t bootstrap_iterations = 1000;
  double level = 0.95;
  std::uint64_t seed = 1337;
};

struct GapReport {
  std::string encoder_name;
  double within = 0.0;
  double cross = 0.0;
  double floor = 0.0;
  double delta = 0.0;   // within - cross
  double margin = 0.0;  // cross - floor
  Interval ci_delta;
  Interval ci_margin;
  std::size_t n_pairs_per_bucket = 0;
  std::size_t n_within = 0, n_cross = 0, n_floor = 0;
  bool shortfall = false;
  std::size_t bootstrap_iterations = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// Delta and margin from three medians, subtracted unrounded. CIs are left
// as the degenerate point intervals.
GapReport GapFromMedians(std::string encoder_name, double within, double cross,
                         double floor);

// Samples the three buckets (in the order within, cross, floor) and then
// bootstraps delta and margin, all from one stream seeded with
// options.seed.
GapReport ComputeGapReport(std::string encoder_name,
                           const std::vector<ClipMeta>& metas,
                           const std::vector<std::vector<double>>& embeddings,
                           const GapOptions& options);

std::string GapReportToJson(const GapReport& report);
// `encoder  within  cross  floor  delta [lo,hi]  M`, three decimals.
std::string FormatGapRow(const GapReport& report);
std::string GapTableHeader(double level = 0.95);

}  // namespace langadv
