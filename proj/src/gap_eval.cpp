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

#include "langadv/gap_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "langadv/error.hpp"

namespace langadv {

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine: dimension mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom =
      std::max(std::sqrt(na), 1e-12) * std::max(std::sqrt(nb), 1e-12);
  return std::clamp(dot / denom, -1.0, 1.0);
}

const char* PairKindName(PairKind kind) {
  switch (kind) {
    case PairKind::kWithinScript:
      return "within_script";
    case PairKind::kCrossScript:
      return "cross_script";
    case PairKind::kAcrossSpeaker:
      return "across_speaker";
  }
  return "?";
}

bool SatisfiesPredicate(const ClipMeta& a, const ClipMeta& b, PairKind kind) {
  switch (kind) {
    case PairKind::kWithinScript:
      return a.voice == b.voice && a.lang == b.lang && a.clip_id != b.clip_id;
    case PairKind::kCrossScript:
      return a.voice == b.voice && a.lang != b.lang;
    case PairKind::kAcrossSpeaker:
      return a.voice != b.voice && a.lang == b.lang;
  }
  return false;
}

PairSample SamplePairs(const std::vector<ClipMeta>& metas,
                       const std::vector<std::vector<double>>& embeddings,
                       PairKind kind, std::size_t n, Rng& rng) {
  if (n == 0) throw DataError("sample_pairs: n must be >= 1");
  if (metas.size() != embeddings.size()) {
    throw DataError("sample_pairs: metadata/embedding count mismatch");
  }
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    for (std::size_t j = i + 1; j < metas.size(); ++j) {
      if (SatisfiesPredicate(metas[i], metas[j], kind)) all.emplace_back(i, j);
    }
  }
  if (all.empty()) {
    throw DataError(std::string("sample_pairs: no ") + PairKindName(kind) +
                    " pairs");
  }
  PairSample out;
  out.available = all.size();
  out.shortfall = all.size() < n;
  const std::size_t take = std::min(n, all.size());
  for (std::size_t k : rng.SampleWithoutReplacement(all.size(), take)) {
    const auto [i, j] = all[k];
    out.pairs.emplace_back(i, j);
    out.cosines.push_back(Cosine(embeddings[i], embeddings[j]));
  }
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of empty input");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("percentile of empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw DataError("percentile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

Interval BootstrapMedianDifference(std::span<const double> a,
                                   std::span<const double> b,
                                   std::size_t iterations, Rng& rng,
                                   double level) {
  if (a.empty() || b.empty()) throw DataError("bootstrap: empty bucket");
  if (iterations < 1) throw DataError("bootstrap: iterations must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw DataError("bootstrap: level must be in (0, 1)");
  }
  std::vector<double> stats;
  stats.reserve(iterations);
  std::vector<double> ra(a.size()), rb(b.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    for (double& x : ra) x = a[rng.UniformInt(a.size())];
    for (double& x : rb) x = b[rng.UniformInt(b.size())];
    stats.push_back(Median(ra) - Median(rb));
  }
  const double tail = 0.5 * (1.0 - level);
  return {Percentile(stats, tail), Percentile(stats, 1.0 - tail)};
}

GapReport GapFromMedians(std::string encoder_name, double within, double cross,
                         double floor) {
  GapReport r;
  r.encoder_name = std::move(encoder_name);
  r.within = within;
  r.cross = cross;
  r.floor = floor;
  r.delta = within - cross;
  r.margin = cross - floor;
  r.ci_delta = {r.delta, r.delta};
  r.ci_margin = {r.margin, r.margin};
  return r;
}

GapReport ComputeGapReport(std::string encoder_name,
                           const std::vector<ClipMeta>& metas,
                           const std::vector<std::vector<double>>& embeddings,
                           const GapOptions& options) {
  Rng rng(options.seed);
  const PairSample within = SamplePairs(metas, embeddings,
                                        PairKind::kWithinScript,
                                        options.n_pairs, rng);
  const PairSample cross = SamplePairs(metas, embeddings,
                                       PairKind::kCrossScript, options.n_pairs,
                                       rng);
  const PairSample floor = SamplePairs(metas, embeddings,
                                       PairKind::kAcrossSpeaker,
                                       options.n_pairs, rng);
  GapReport r = GapFromMedians(std::move(encoder_name), Median(within.cosines),
                               Median(cross.cosines), Median(floor.cosines));
  r.ci_delta = BootstrapMedianDifference(within.cosines, cross.cosines,
                                         options.bootstrap_iterations, rng,
                                         options.level);
  r.ci_margin = BootstrapMedianDifference(cross.cosines, floor.cosines,
                                          options.bootstrap_iterations, rng,
                                          options.level);
  r.n_pairs_per_bucket = options.n_pairs;
  r.n_within = within.cosines.size();
  r.n_cross = cross.cosines.size();
  r.n_floor = floor.cosines.size();
  r.shortfall = within.shortfall || cross.shortfall || floor.shortfall;
  r.bootstrap_iterations = options.bootstrap_iterations;
  r.level = options.level;
  r.seed = options.seed;
  return r;
}

std::string GapReportToJson(const GapReport& r) {
  nlohmann::json j = {
      {"encoder", r.encoder_name},
      {"medians", {{"within", r.within}, {"cross", r.cross}, {"floor", r.floor}}},
      {"delta", r.delta},
      {"margin", r.margin},
      {"ci_delta", {r.ci_delta.lo, r.ci_delta.hi}},
      {"ci_margin", {r.ci_margin.lo, r.ci_margin.hi}},
      {"n_pairs_per_bucket", r.n_pairs_per_bucket},
      {"pairs_sampled",
       {{"within", r.n_within}, {"cross", r.n_cross}, {"floor", r.n_floor}}},
      {"shortfall", r.shortfall},
      {"bootstrap_iterations", r.bootstrap_iterations},
      {"level", r.level},
      {"seed", r.seed},
      {"note", "delta and margin are differences of unrounded medians"}};
  return j.dump(2);
}

std::string GapTableHeader(double level) {
  char ci[48];
  std::snprintf(ci, sizeof ci, "delta [%g%% CI]", level * 100.0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %7s %7s %7s  %-22s %7s", "encoder",
                "within", "cross", "floor", ci, "M");
  return buf;
}

std::string FormatGapRow(const GapReport& r) {
  char ci[64];
  std::snprintf(ci, sizeof ci, "%.3f [%.3f,%.3f]", r.delta, r.ci_delta.lo,
                r.ci_delta.hi);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-24s %7.3f %7.3f %7.3f  %-22s %7.3f",
                r.encoder_name.c_str(), r.within, r.cross, r.floor, ci,
                r.margin);
  return buf;
}

}  // namespace langadv
