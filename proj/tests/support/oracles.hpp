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

// Independent reference implementations shared by the unit and acceptance
// tests. Deliberately naive.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace langadv_test {

inline double CosineDistance(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double c = dot / (std::max(std::sqrt(na), 1e-12) * std::max(std::sqrt(nb), 1e-12));
  c = std::min(1.0, std::max(-1.0, c));
  return 1.0 - c;
}

// Average linkage, recomputing every cluster-pair linkage from scratch
// before each merge. Clusters are kept ordered by their smallest member.
inline std::vector<int> BruteAgglomerative(
    const std::vector<std::vector<double>>& x, std::size_t k) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < x.size(); ++i) clusters.push_back({i});
  while (clusters.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double total = 0.0;
        for (std::size_t p : clusters[i]) {
          for (std::size_t q : clusters[j]) total += CosineDistance(x[p], x[q]);
        }
        const double avg =
            total / static_cast<double>(clusters[i].size() * clusters[j].size());
        if (avg < best) {
          best = avg;
          bi = i;
          bj = j;
        }
      }
    }
    for (std::size_t q : clusters[bj]) clusters[bi].push_back(q);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<int> labels(x.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t i : clusters[c]) labels[i] = static_cast<int>(c);
  }
  return labels;
}

// True when the two labelings induce the same partition.
inline bool SamePartition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

inline double Choose2(double n) { return n * (n - 1.0) / 2.0; }

// ARI from an explicitly built contingency table.
inline double ContingencyAri(const std::vector<int>& pred,
                             const std::vector<int>& truth) {
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    table[{pred[i], truth[i]}] += 1.0;
    rows[pred[i]] += 1.0;
    cols[truth[i]] += 1.0;
  }
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, n] : table) index += Choose2(n);
  for (const auto& [key, n] : rows) sa += Choose2(n);
  for (const auto& [key, n] : cols) sb += Choose2(n);
  const double expected = sa * sb / Choose2(static_cast<double>(pred.size()));
  const double denom = 0.5 * (sa + sb) - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

// ARI from pair counts: 2 (n00 n11 - n01 n10) / ((n00+n01)(n01+n11) +
// (n00+n10)(n10+n11)).
inline double PairCountAri(const std::vector<int>& pred,
                           const std::vector<int>& truth) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool p = pred[i] == pred[j];
      const bool t = truth[i] == truth[j];
      if (p && t) ++n11;
      else if (p) ++n10;
      else if (t) ++n01;
      else ++n00;
    }
  }
  const double denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (denom == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / denom;
}

}  // namespace langadv_test
