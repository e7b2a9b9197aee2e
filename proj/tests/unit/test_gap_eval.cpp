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

#include <algorithm>
#include <cmath>
#include <set>

#include "langadv/corpus.hpp"
#include "langadv/error.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/trainer.hpp"

using namespace langadv;

namespace {

struct Fixture {
  std::vector<ClipMeta> metas;
  std::vector<std::vector<double>> emb;
};

Fixture FromCorpus(const Corpus& corpus) {
  Fixture f;
  const EmbeddingTable t = PassThroughEmbeddings(corpus);
  for (const Clip& c : corpus.clips) {
    f.metas.push_back({c.clip_id, c.voice, c.lang});
    f.emb.push_back(t.at(c.clip_id).vector);
  }
  return f;
}

Corpus SmallCorpus() {
  SynthConfig s;
  s.num_voices = 4;
  s.clips_per_voice_per_lang = 6;
  s.feature_dim = 16;
  return GenerateSynthetic(s);
}

}  // namespace

TEST_CASE("cosine") {
  const std::vector<double> a{1, 2, 3};
  CHECK(Cosine(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(Cosine(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == -1.0);
  CHECK(Cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}) == 0.0);
  CHECK_THROWS_AS(Cosine(a, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("predicates are mutually exclusive") {
  const std::vector<ClipMeta> m{{"a", "v1", "en"}, {"b", "v1", "en"},
                                {"c", "v1", "hi"}, {"d", "v2", "en"},
                                {"e", "v2", "hi"}};
  for (const auto& x : m) {
    for (const auto& y : m) {
      int hits = 0;
      for (PairKind k : {PairKind::kWithinScript, PairKind::kCrossScript,
                         PairKind::kAcrossSpeaker}) {
        hits += SatisfiesPredicate(x, y, k);
      }
      CHECK(hits <= 1);
    }
  }
  CHECK_FALSE(SatisfiesPredicate(m[0], m[0], PairKind::kWithinScript));
  CHECK(SatisfiesPredicate(m[0], m[1], PairKind::kWithinScript));
  CHECK(SatisfiesPredicate(m[0], m[2], PairKind::kCrossScript));
  CHECK(SatisfiesPredicate(m[0], m[3], PairKind::kAcrossSpeaker));
  CHECK_FALSE(SatisfiesPredicate(m[0], m[4], PairKind::kAcrossSpeaker));
}

TEST_CASE("pair sampling") {
  const std::vector<ClipMeta> two{{"a", "v", "en"}, {"b", "v", "en"}};
  const std::vector<std::vector<double>> e{{1, 0}, {1, 1}};
  Rng rng(1);
  const PairSample s = SamplePairs(two, e, PairKind::kWithinScript, 200, rng);
  CHECK(s.pairs.size() == 1);
  CHECK(s.shortfall);
  CHECK(s.available == 1);
  CHECK(s.cosines[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(SamplePairs(two, e, PairKind::kWithinScript, 0, rng),
                  DataError);
  CHECK_THROWS_AS(SamplePairs(two, e, PairKind::kCrossScript, 5, rng),
                  DataError);

  const Fixture f = FromCorpus(SmallCorpus());
  Rng a(2), b(2);
  const PairSample p = SamplePairs(f.metas, f.emb, PairKind::kCrossScript, 50, a);
  CHECK(p.pairs ==
        SamplePairs(f.metas, f.emb, PairKind::kCrossScript, 50, b).pairs);
  CHECK(p.pairs.size() == 50);
  CHECK_FALSE(p.shortfall);
  std::set<std::pair<std::size_t, std::size_t>> uniq(p.pairs.begin(),
                                                     p.pairs.end());
  CHECK(uniq.size() == 50);
  for (const auto& [i, j] : p.pairs) {
    CHECK(i < j);
    CHECK(SatisfiesPredicate(f.metas[i], f.metas[j], PairKind::kCrossScript));
  }
  // 4 voices, each C(24,2) pairs minus 4 * C(6,2) same-language ones
  CHECK(p.available == 4 * (276 - 60));
}

TEST_CASE("median and percentile") {
  CHECK(Median({3}) == 3);
  CHECK(Median({1, 2, 3, 4}) == 2.5);
  CHECK(Median({4, 1, 3}) == 3);
  CHECK_THROWS_AS(Median({}), DataError);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng.UniformInt(30));
    for (double& x : v) x = rng.Normal();
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const double want = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2;
    CHECK(Median(v) == want);
  }

  std::vector<double> ranks(1000);
  for (std::size_t i = 0; i < 1000; ++i) ranks[i] = static_cast<double>(i + 1);
  CHECK(Percentile(ranks, 0.025) == doctest::Approx(25.975));
  CHECK(Percentile(ranks, 0.975) == doctest::Approx(975.025));
  CHECK(Percentile(ranks, 0.0) == 1.0);
  CHECK(Percentile(ranks, 1.0) == 1000.0);
}

TEST_CASE("bootstrap") {
  const std::vector<double> a(30, 0.9), b(40, 0.8);
  Rng rng(4);
  const Interval ci = BootstrapMedianDifference(a, b, 1000, rng);
  CHECK(ci.lo == ci.hi);
  CHECK(ci.lo == 0.9 - 0.8);

  auto width = [](std::size_t n) {
    Rng r(5);
    std::vector<double> x(n), y(n);
    for (double& v : x) v = r.Normal();
    for (double& v : y) v = r.Normal();
    const Interval i = BootstrapMedianDifference(x, y, 1000, r);
    CHECK(i.lo <= i.hi);
    return i.hi - i.lo;
  };
  CHECK(width(200) < width(20));
  CHECK_THROWS_AS(BootstrapMedianDifference({}, b, 10, rng), DataError);
  CHECK_THROWS_AS(BootstrapMedianDifference(a, b, 0, rng), DataError);
}

TEST_CASE("gap arithmetic from recorded medians") {
  const GapReport r = GapFromMedians("baseline", 0.927, 0.845, 0.600);
  CHECK(std::abs(r.delta - 0.082) < 1e-12);
  CHECK(std::abs(r.margin - 0.245) < 1e-12);
  CHECK(FormatGapRow(r).find("0.082") != std::string::npos);
  const GapReport l = GapFromMedians("adversarial", 0.757, 0.745, 0.083);
  CHECK(std::abs(l.delta - 0.012) < 1e-12);
  CHECK(std::abs(l.margin - 0.662) < 1e-12);
  CHECK(FormatGapRow(l).find("0.012") != std::string::npos);
  const GapReport z = GapFromMedians("flat", 0.5, 0.5, 0.5);
  CHECK(z.delta == 0.0);
  CHECK(z.margin == 0.0);
}

TEST_CASE("gap report on a synthetic corpus") {
  const Fixture f = FromCorpus(SmallCorpus());
  GapOptions o;
  o.n_pairs = 40;
  o.bootstrap_iterations = 200;
  const GapReport r = ComputeGapReport("pt", f.metas, f.emb, o);
  CHECK(r.delta == r.within - r.cross);
  CHECK(r.margin == r.cross - r.floor);
  CHECK(r.within >= r.cross);
  CHECK(r.cross >= r.floor);
  CHECK(r.ci_delta.lo <= r.ci_delta.hi);
  CHECK(r.ci_margin.lo <= r.ci_margin.hi);
  CHECK(r.n_within == 40);
  CHECK_FALSE(r.shortfall);
  const GapReport again = ComputeGapReport("pt", f.metas, f.emb, o);
  CHECK(GapReportToJson(again) == GapReportToJson(r));

  o.n_pairs = 100000;
  o.bootstrap_iterations = 10;
  const GapReport big = ComputeGapReport("pt", f.metas, f.emb, o);
  CHECK(big.shortfall);
  CHECK(big.n_within == 4 * 4 * 15);
}

TEST_CASE("table header follows the level") {
  CHECK(GapTableHeader().find("95% CI") != std::string::npos);
  CHECK(GapTableHeader(0.9).find("90% CI") != std::string::npos);
}
