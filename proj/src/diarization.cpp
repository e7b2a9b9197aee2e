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

#include "langadv/diarization.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "langadv/error.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/io.hpp"

namespace langadv {

double Conversation::EndTime() const {
  if (segments.empty()) return 0.0;
  return segments.back().onset_s + segments.back().duration_s;
}

namespace {

std::string ConversationId(std::size_t i, std::size_t total) {
  std::string n = std::to_string(i);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total).size());
  return "conv" + std::string(width > n.size() ? width - n.size() : 0, '0') + n;
}

// Picks uniformly among `langs` whose pool holds at least `need` clips,
// excluding `exclude`. Returns empty when none qualify.
std::string PickLanguage(const std::map<std::string, std::vector<std::size_t>>& pool,
                         std::size_t need, const std::string& exclude, Rng& rng) {
  std::vector<std::string> ok;
  for (const auto& [lang, clips] : pool) {
    if (lang != exclude && clips.size() >= need) ok.push_back(lang);
  }
  if (ok.empty()) return {};
  return ok[rng.UniformInt(ok.size())];
}

}  // namespace

std::vector<Conversation> BuildBenchmark(const Corpus& corpus,
                                         const BenchmarkOptions& options,
                                         Rng& rng) {
  if (options.min_speakers < 1 || options.max_speakers < options.min_speakers ||
      options.min_segments < options.max_speakers ||
      options.max_segments < options.min_segments) {
    throw DataError("benchmark: inconsistent speaker/segment ranges");
  }
  if (!(options.gap_s >= 0.0)) throw DataError("benchmark: negative gap");

  // voice -> lang -> clip indices (corpus order).
  std::map<std::string, std::map<std::string, std::vector<std::size_t>>> pools;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const Clip& c = corpus.clips[i];
    pools[c.voice][c.lang].push_back(i);
  }
  std::vector<std::string> eligible;
  for (const auto& [voice, by_lang] : pools) {
    std::size_t total = 0;
    for (const auto& [lang, clips] : by_lang) total += clips.size();
    if (total >= options.max_segments) eligible.push_back(voice);
  }
  if (eligible.size() < options.max_speakers) {
    throw DataError("benchmark: insufficient pool, need " +
                    std::to_string(options.max_speakers) + " voices with >= " +
                    std::to_string(options.max_segments) + " clips, have " +
                    std::to_string(eligible.size()));
  }

  std::vector<Conversation> out;
  for (std::size_t ci = 0; ci < options.num_conversations; ++ci) {
    Conversation conv;
    conv.id = ConversationId(ci, options.num_conversations);
    const auto k = static_cast<std::size_t>(
        rng.UniformInt(static_cast<std::int64_t>(options.min_speakers),
                       static_cast<std::int64_t>(options.max_speakers)));
    const auto n = static_cast<std::size_t>(
        rng.UniformInt(static_cast<std::int64_t>(options.min_segments),
                       static_cast<std::int64_t>(options.max_segments)));
    std::vector<std::string> voices;
    for (std::size_t pick : rng.SampleWithoutReplacement(eligible.size(), k)) {
      voices.push_back(eligible[pick]);
    }

    // Speaker of each segment: everyone once, the rest uniform, shuffled.
    std::vector<std::size_t> speaker_of(n);
    for (std::size_t s = 0; s < n; ++s) {
      speaker_of[s] = s < k ? s : static_cast<std::size_t>(rng.UniformInt(k));
    }
    rng.Shuffle(speaker_of);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t s : speaker_of) ++count[s];

    std::size_t switcher = k;  // none
    if (rng.Bernoulli(options.code_switch_prob)) {
      std::vector<std::size_t> candidates;
      for (std::size_t s = 0; s < k; ++s) {
        if (count[s] >= 2 && pools[voices[s]].size() >= 2) candidates.push_back(s);
      }
      if (!candidates.empty()) switcher = candidates[rng.UniformInt(candidates.size())];
    }

    // Language per speaker segment, then clips without reuse.
    std::vector<std::vector<std::size_t>> clips_for(k);
    for (std::size_t s = 0; s < k; ++s) {
      const auto& pool = pools[voices[s]];
      std::vector<std::pair<std::string, std::size_t>> plan;
      if (s == switcher) {
        const std::size_t first = (count[s] + 1) / 2;
        const std::string l1 = PickLanguage(pool, first, "", rng);
        const std::string l2 =
            l1.empty() ? "" : PickLanguage(pool, count[s] - first, l1, rng);
        if (l1.empty() || l2.empty()) {
          throw DataError("benchmark: insufficient pool for a language switch "
                          "by voice '" + voices[s] + "'");
        }
        plan = {{l1, first}, {l2, count[s] - first}};
      } else {
        const std::string l = PickLanguage(pool, count[s], "", rng);
        if (l.empty()) {
          throw DataError("benchmark: insufficient pool for voice '" +
                          voices[s] + "' in a single language");
        }
        plan = {{l, count[s]}};
      }
      for (const auto& [lang, need] : plan) {
        const auto& lp = pool.at(lang);
        for (std::size_t p : rng.SampleWithoutReplacement(lp.size(), need)) {
          clips_for[s].push_back(lp[p]);
        }
      }
    }

    std::vector<std::size_t> used(k, 0);
    double onset = 0.0;
    for (std::size_t s : speaker_of) {
      const Clip& c = corpus.clips[clips_for[s][used[s]++]];
      conv.segments.push_back(
          Segment{conv.id, onset, c.duration_s, c.clip_id, c.voice, c.lang});
      onset += c.duration_s + options.gap_s;
    }
    conv.num_speakers = k;
    out.push_back(std::move(conv));
  }
  return out;
}

std::vector<int> AgglomerativeCluster(
    const std::vector<std::vector<double>>& embeddings, std::size_t k) {
  const std::size_t n = embeddings.size();
  if (k < 1 || k > n) {
    throw DataError("agglomerative_cluster: k=" + std::to_string(k) +
                    " outside [1, " + std::to_string(n) + "]");
  }
  // sum[a][b]: total cosine distance between members of clusters a and b.
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum[i][j] = sum[j][i] = 1.0 - Cosine(embeddings[i], embeddings[j]);
    }
  }
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  while (members.size() > k) {
    const std::size_t m = members.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double link =
            sum[i][j] / static_cast<double>(members[i].size() * members[j].size());
        if (link < best) {
          best = link;
          bi = i;
          bj = j;
        }
      }
    }
    for (std::size_t x = 0; x < m; ++x) {
      if (x == bi || x == bj) continue;
      sum[bi][x] += sum[bj][x];
      sum[x][bi] = sum[bi][x];
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
    sum.erase(sum.begin() + static_cast<std::ptrdiff_t>(bj));
    for (auto& row : sum) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::vector<int> labels(n, -1);
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t i : members[c]) labels[i] = static_cast<int>(c);
  }
  return labels;
}

double AdjustedRandIndex(const std::vector<int>& predicted,
                         const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw DataError("ari: label length mismatch");
  }
  const std::size_t n = predicted.size();
  if (n < 2) throw DataError("ari: need at least two items");
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, std::size_t> cells;
  std::map<int, std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    ++cells[{predicted[i], truth[i]}];
    ++rows[predicted[i]];
    ++cols[truth[i]];
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : cells) index += choose2(static_cast<double>(c));
  for (const auto& [key, c] : rows) sum_a += choose2(static_cast<double>(c));
  for (const auto& [key, c] : cols) sum_b += choose2(static_cast<double>(c));
  const double expected = sum_a * sum_b / choose2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

CrossScriptRecall ComputeCrossScriptRecall(
    const std::vector<Conversation>& conversations,
    const std::vector<std::vector<int>>& predicted) {
  if (predicted.size() != conversations.size()) {
    throw DataError("cs_recall: prediction count mismatch");
  }
  CrossScriptRecall r;
  for (std::size_t c = 0; c < conversations.size(); ++c) {
    const auto& segs = conversations[c].segments;
    if (predicted[c].size() != segs.size()) {
      throw DataError("cs_recall: predictions do not cover conversation " +
                      conversations[c].id);
    }
    std::map<std::string, std::vector<std::size_t>> by_voice;
    for (std::size_t s = 0; s < segs.size(); ++s) by_voice[segs[s].voice].push_back(s);
    for (const auto& [voice, idx] : by_voice) {
      std::map<std::string, std::size_t> lang_count;
      for (std::size_t s : idx) ++lang_count[segs[s].lang];
      if (lang_count.size() < 2) continue;
      // Majority language; std::map order makes ties go to the smallest.
      std::string major;
      std::size_t best = 0;
      for (const auto& [lang, cnt] : lang_count) {
        if (cnt > best) {
          best = cnt;
          major = lang;
        }
      }
      std::map<int, std::size_t> anchor_votes;
      for (std::size_t s : idx) {
        if (segs[s].lang == major) ++anchor_votes[predicted[c][s]];
      }
      int anchor = 0;
      std::size_t votes = 0;
      for (const auto& [label, cnt] : anchor_votes) {
        if (cnt > votes) {
          votes = cnt;
          anchor = label;
        }
      }
      ++r.qualifying_speakers;
      for (std::size_t s : idx) {
        if (segs[s].lang == major) continue;
        ++r.cross_segments;
        if (predicted[c][s] == anchor) ++r.hits;
      }
    }
  }
  r.vacuous = r.cross_segments == 0;
  r.recall = r.vacuous ? 1.0
                       : static_cast<double>(r.hits) /
                             static_cast<double>(r.cross_segments);
  return r;
}

std::string RttmToString(const std::vector<Conversation>& conversations) {
  std::string out;
  char buf[512];
  for (const Conversation& conv : conversations) {
    for (const Segment& s : conv.segments) {
      std::snprintf(buf, sizeof buf,
                    "SPEAKER %s 1 %.3f %.3f <NA> <NA> %s <NA> <NA>\n",
                    s.conversation_id.c_str(), s.onset_s, s.duration_s,
                    s.voice.c_str());
      out += buf;
    }
  }
  return out;
}

void WriteRttm(const std::vector<Conversation>& conversations,
               const std::string& path) {
  WriteFileAtomic(path, RttmToString(conversations));
}

namespace {

double ParseReal(const std::string& token, std::size_t line, const char* field) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || errno != 0 ||
      !std::isfinite(v)) {
    throw DataError("rttm line " + std::to_string(line) + ": bad " + field +
                    " '" + token + "'");
  }
  return v;
}

}  // namespace

std::vector<RttmEntry> ParseRttm(const std::string& text) {
  std::vector<RttmEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 10 || tok[0] != "SPEAKER") {
      throw DataError("rttm line " + std::to_string(line_no) +
                      ": expected 10 fields starting with SPEAKER");
    }
    RttmEntry e;
    e.conversation_id = tok[1];
    e.onset_s = ParseReal(tok[3], line_no, "onset");
    e.duration_s = ParseReal(tok[4], line_no, "duration");
    e.voice = tok[7];
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<RttmEntry> ReadRttm(const std::string& path) {
  return ParseRttm(ReadFile(path));
}

std::vector<int> TruthLabels(const Conversation& conversation) {
  std::map<std::string, int> ids;
  std::vector<int> labels;
  for (const Segment& s : conversation.segments) {
    auto it = ids.try_emplace(s.voice, static_cast<int>(ids.size())).first;
    labels.push_back(it->second);
  }
  return labels;
}

DiarReport RunDiarEval(const std::string& encoder_name,
                       const std::vector<Conversation>& conversations,
                       const SegmentEmbedder& embed,
                       std::vector<std::vector<int>>* predicted) {
  std::vector<std::size_t> order(conversations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return conversations[a].id < conversations[b].id;
  });

  DiarReport r;
  r.encoder_name = encoder_name;
  std::vector<std::vector<int>> preds(conversations.size());
  for (std::size_t c : order) {
    const Conversation& conv = conversations[c];
    std::vector<std::vector<double>> emb;
    for (const Segment& s : conv.segments) emb.push_back(embed(s));
    preds[c] = AgglomerativeCluster(emb, conv.num_speakers);
    r.conversation_ids.push_back(conv.id);
    r.ari.push_back(AdjustedRandIndex(preds[c], TruthLabels(conv)));
    r.num_segments += conv.segments.size();
    r.total_minutes += conv.EndTime() / 60.0;
  }
  r.num_conversations = conversations.size();
  if (!r.ari.empty()) {
    double s = 0.0;
    for (double a : r.ari) s += a;
    r.ari_mean = s / static_cast<double>(r.ari.size());
    r.ari_median = Median(r.ari);
  }
  r.cs = ComputeCrossScriptRecall(conversations, preds);
  if (predicted) *predicted = std::move(preds);
  return r;
}

std::string DiarReportToJson(const DiarReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < r.ari.size(); ++i) {
    per.push_back({{"conversation_id", r.conversation_ids[i]}, {"ari", r.ari[i]}});
  }
  nlohmann::json j = {
      {"encoder", r.encoder_name},
      {"ari_mean", r.ari_mean},
      {"ari_median", r.ari_median},
      {"cs_recall", r.cs.recall},
      {"cs_recall_detail",
       {{"cross_segments", r.cs.cross_segments},
        {"hits", r.cs.hits},
        {"qualifying_speakers", r.cs.qualifying_speakers},
        {"vacuous", r.cs.vacuous}}},
      {"conversations", r.num_conversations},
      {"segments", r.num_segments},
      {"total_minutes", r.total_minutes},
      {"per_conversation", per}};
  return j.dump(2);
}

std::string DiarTableHeader() {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-24s %10s %11s %10s", "encoder", "ari_mean",
                "ari_median", "cs_recall");
  return buf;
}

std::string FormatDiarRow(const DiarReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %10.3f %11.3f %10.3f",
                r.encoder_name.c_str(), r.ari_mean, r.ari_median, r.cs.recall);
  return buf;
}

std::string PredictedLabelsToJsonl(
    const std::vector<Conversation>& conversations,
    const std::vector<std::vector<int>>& predicted) {
  std::string out;
  for (std::size_t c = 0; c < conversations.size(); ++c) {
    for (std::size_t s = 0; s < conversations[c].segments.size(); ++s) {
      nlohmann::json j = {{"conversation_id", conversations[c].id},
                          {"segment", s},
                          {"label", predicted.at(c).at(s)}};
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace langadv
