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

// Acceptance checks. Prints one PASS/FAIL line per criterion followed by a
// summary. Exits 0 once every check has run so that ctest records the run;
// the FAIL lines and the summary carry the verdicts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "langadv/autodiff.hpp"
#include "langadv/cli.hpp"
#include "langadv/corpus.hpp"
#include "langadv/diarization.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/io.hpp"
#include "langadv/model.hpp"
#include "langadv/objective.hpp"
#include "langadv/rng.hpp"
#include "langadv/trainer.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace langadv;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

int failures = 0;

void Report(int id, const std::string& title, bool ok,
            const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << title << ": "
            << detail << std::endl;
}

Tensor RandomMatrix(std::size_t r, std::size_t c, Rng& rng) {
  Tensor t(Shape{r, c});
  for (double& v : t.data()) v = rng.Normal();
  return t;
}

void GradientCheck() {
  ModelGradCheckOptions opts;
  opts.check.max_coords_per_tensor = 256;
  const auto t0 = Clock::now();
  const GradCheckResult r = ModelGradCheck(ModelConfig{}, 1337, opts);
  const double secs = Seconds(t0);
  Report(1, "gradient check, default model", r.max_relative_error < 1e-4 && secs < 30.0,
         Fmt("max rel err %.3g (< 1e-4) over %.0f coords, %.1f s (< 30 s)",
             r.max_relative_error, static_cast<double>(r.coords_checked), secs));
}

struct Grads {
  Tensor z;                    // gradient reaching the head output
  std::vector<Tensor> params;  // w1, b1, w2, b2
};

Grads LangGrads(const ModelParams& p, const ModelConfig& cfg, const Tensor& x,
                const std::vector<int>& langs, const double* lambda,
                bool* forward_exact) {
  ModelVars vars = ModelVars::Trainable(p);
  Var z = ProjectPooled(vars, cfg, Constant(x), false, nullptr);
  Var in = z;
  if (lambda != nullptr) {
    in = GradientReversal(z, *lambda);
    *forward_exact = in.value() == z.value();
  }
  Backward(LanguageCrossEntropy(ClassifyLanguage(vars, cfg, in), langs));
  return {z.grad(),
          {vars.w1.grad(), vars.b1.grad(), vars.w2.grad(), vars.b2.grad()}};
}

void GrlContract() {
  ModelConfig cfg;
  cfg.input_dim = 32;
  cfg.hidden_dim = 48;
  cfg.embed_dim = 24;
  cfg.classifier_hidden = 16;
  Rng rng(1337);
  bool forward_ok = true, z_exact = true, params_close = true;
  int params_exact = 0, pow2_cases = 0, pow2_exact = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = InitParams(cfg, rng);
    const Tensor x = RandomMatrix(8, cfg.input_dim, rng);
    std::vector<int> langs(8);
    for (int& l : langs) l = static_cast<int>(rng.UniformInt(4));
    const bool pow2 = trial % 4 == 0;
    const double lambda =
        pow2 ? std::ldexp(1.0, static_cast<int>(rng.UniformInt(-8, 1)))
             : rng.Uniform(0.0, 2.0);
    bool fwd = false;
    const Grads plain = LangGrads(p, cfg, x, langs, nullptr, nullptr);
    const Grads rev = LangGrads(p, cfg, x, langs, &lambda, &fwd);
    forward_ok = forward_ok && fwd;
    for (std::size_t i = 0; i < plain.z.size(); ++i) {
      z_exact = z_exact && rev.z[i] == -lambda * plain.z[i];
    }
    bool all_exact = true;
    for (std::size_t t = 0; t < plain.params.size(); ++t) {
      double scale = 0.0;
      for (double v : plain.params[t].data()) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < plain.params[t].size(); ++i) {
        const double want = -lambda * plain.params[t][i];
        const double err = std::abs(rev.params[t][i] - want);
        all_exact = all_exact && err == 0.0;
        if (scale > 0.0) worst = std::max(worst, err / (lambda * scale));
        params_close = params_close && err <= 1e-12 * lambda * scale;
      }
    }
    params_exact += all_exact;
    pow2_cases += pow2;
    pow2_exact += pow2 && all_exact;
  }
  Report(2, "gradient reversal contract",
         forward_ok && z_exact && params_close && pow2_exact == pow2_cases,
         std::string("forward identical ") + (forward_ok ? "yes" : "no") +
             ", head-output gradient == -lambda*g bitwise " +
             (z_exact ? "yes" : "no") +
             Fmt("; head parameter grads bitwise equal in %.0f/100 cases "
                 "(%.0f/%.0f power-of-two lambda), max deviation %.2g of "
                 "lambda*max|g| (<= 1e-12)",
                 params_exact, pow2_exact, pow2_cases, worst));
}

void LossAnchors() {
  const Var ce = LanguageCrossEntropy(Constant(Tensor(Shape{3, 4})), std::vector<int>{0, 1, 3});
  const double ce_err = std::abs(ce.value()[0] - std::log(4.0));
  const Var z = Constant(Tensor::FromRows({{0.6, 0.8}, {0.6, 0.8}}));
  const double sc = std::abs(SupConLoss(z, std::vector<int>{7, 7}, 0.07).value()[0]);
  Report(3, "loss anchors", ce_err <= 1e-12 && sc <= 1e-12,
         Fmt("|CE(0) - ln 4| = %.2g, SupCon(duplicate pair) = %.2g (<= 1e-12)",
             ce_err, sc));
}

void LambdaSchedule() {
  const std::vector<std::int64_t> steps{0, 199, 200, 450, 699, 700, 1000};
  const std::vector<double> want{0, 0, 0, 0.05, 0.0998, 0.1, 0.1};
  double worst = 0.0;
  std::string got;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double v = LambdaAt(steps[i], LossConfig{});
    worst = std::max(worst, std::abs(v - want[i]));
    got += (i ? "," : "") + Fmt("%g", v);
  }
  Report(4, "lambda schedule", worst <= 1e-12,
         "{" + got + "}" + Fmt(", max err %.2g", worst));
}

void TableArithmetic() {
  const GapReport a = GapFromMedians("a", 0.927, 0.845, 0.600);
  const GapReport b = GapFromMedians("b", 0.757, 0.745, 0.083);
  const auto near = [](double x, double y) { return std::abs(x - y) < 1e-9; };
  const bool ok = near(a.delta, 0.082) && near(a.margin, 0.245) &&
                  near(b.delta, 0.012) && near(b.margin, 0.662);
  Report(5, "gap arithmetic from medians", ok,
         Fmt("delta %.3f M %.3f; delta %.3f M %.3f", a.delta, a.margin, b.delta,
             b.margin));
}

struct DeskRun {
  Corpus corpus;
  TrainState state;
  GapReport pass, trained;
  double train_secs = 0.0;
  EmbeddingTable pass_emb, trained_emb;
};

GapReport Gap(const std::string& name, const Corpus& corpus,
              const EmbeddingTable& emb) {
  std::vector<ClipMeta> metas;
  std::vector<std::vector<double>> vecs;
  for (const Clip& c : corpus.clips) {
    metas.push_back({c.clip_id, c.voice, c.lang});
    vecs.push_back(emb.at(c.clip_id).vector);
  }
  return ComputeGapReport(name, metas, vecs, GapOptions{});
}

DeskRun RunDesk() {
  DeskRun run;
  SynthConfig sc;
  sc.seed = 1337;
  sc.num_voices = 8;
  sc.clips_per_voice_per_lang = 20;
  sc.feature_dim = 32;
  sc.language_scale = 0.5;
  sc.noise_scale = 0.1;
  run.corpus = GenerateSynthetic(sc);
  TrainConfig tc;
  tc.model.input_dim = sc.feature_dim;
  const auto t0 = Clock::now();
  run.state = Train(run.corpus, tc);
  run.pass_emb = PassThroughEmbeddings(run.corpus);
  run.trained_emb = EvaluateEmbeddings(run.state.params, tc.model, run.corpus);
  run.train_secs = Seconds(t0);
  run.pass = Gap("passthrough", run.corpus, run.pass_emb);
  run.trained = Gap("trained", run.corpus, run.trained_emb);
  return run;
}

void GapClosure(const DeskRun& run) {
  const bool closes = run.trained.delta <= 0.5 * run.pass.delta;
  const bool margin = run.trained.margin >= run.pass.margin;
  Report(6, "gap closure at desk scale",
         closes && margin && run.train_secs < 300.0,
         Fmt("delta trained %.4f <= 0.5*passthrough %.4f: ", run.trained.delta,
             0.5 * run.pass.delta) +
             (closes ? "yes" : "no") +
             Fmt("; M trained %.4f >= passthrough %.4f; %.1f s", run.trained.margin,
                 run.pass.margin, run.train_secs));
}

void Equilibrium(const DeskRun& run) {
  const auto& h = run.state.history;
  double first = 0.0, last_spk = 0.0, last_lang = 0.0;
  for (std::size_t i = 0; i < 10; ++i) first += h[i].l_spk / 10.0;
  for (std::size_t i = h.size() - 100; i < h.size(); ++i) {
    last_spk += h[i].l_spk / 100.0;
    last_lang += h[i].l_lang / 100.0;
  }
  Report(7, "adversarial equilibrium",
         last_lang >= 1.2 && last_lang <= 1.6 && last_spk < first,
         Fmt("final-100 L_lang %.4f in [1.2, 1.6]; L_spk final-100 %.5f < "
             "first-10 %.5f",
             last_lang, last_spk, first));
}

void BootstrapSanity(const DeskRun& run) {
  Rng rng(1337);
  const std::vector<double> a(200, 0.9), b(200, 0.8);
  const Interval ci = BootstrapMedianDifference(a, b, 1000, rng);
  const double point = Median(a) - Median(b);
  const bool constant_ok = ci.lo == point && ci.hi == point;
  const bool trained_ok = run.trained.ci_delta.lo <= 0.02;
  const bool pass_ok = run.pass.ci_delta.lo > 0.05;
  Report(8, "bootstrap sanity", constant_ok && trained_ok && pass_ok,
         std::string("constant buckets give [") + Fmt("%.17g, %.17g] = %.17g", ci.lo, ci.hi, point) +
             (constant_ok ? " ok" : " differs") +
             Fmt("; trained delta CI [%.4f, %.4f] reaches <= 0.02: ",
                 run.trained.ci_delta.lo, run.trained.ci_delta.hi) +
             (trained_ok ? "yes" : "no") +
             Fmt("; passthrough delta CI [%.4f, %.4f] lower > 0.05: ",
                 run.pass.ci_delta.lo, run.pass.ci_delta.hi) +
             (pass_ok ? "yes" : "no"));
}

void ClusteringOracle() {
  Rng rng(1337);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.UniformInt(10);
    const std::size_t k = 1 + rng.UniformInt(n);
    const std::size_t d = 1 + rng.UniformInt(5);
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    for (auto& row : x) {
      for (double& v : row) v = rng.Normal();
    }
    agree += langadv_test::SamePartition(AgglomerativeCluster(x, k),
                                         langadv_test::BruteAgglomerative(x, k));
  }
  Report(9, "clustering oracle", agree == 200,
         Fmt("%.0f/200 instances identical up to renaming", agree));
}

void AriOracle() {
  Rng rng(1337);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.UniformInt(11);
    std::vector<int> a(n), b(n);
    const auto ka = 1 + rng.UniformInt(5), kb = 1 + rng.UniformInt(5);
    for (int& v : a) v = static_cast<int>(rng.UniformInt(ka));
    for (int& v : b) v = static_cast<int>(rng.UniformInt(kb));
    worst = std::max(worst, std::abs(AdjustedRandIndex(a, b) -
                                     langadv_test::ContingencyAri(a, b)));
  }
  const double hand = AdjustedRandIndex({0, 0, 1, 1}, {0, 1, 0, 1});
  Report(10, "ARI oracle", worst <= 1e-12 && std::abs(hand + 0.5) <= 1e-12,
         Fmt("max |diff| %.2g over 200 pairs; hand case %.17g", worst, hand));
}

EmbeddingTable OneHot(const Corpus& corpus) {
  const auto voices = corpus.Voices();
  EmbeddingTable t;
  for (const Clip& c : corpus.clips) {
    std::vector<double> v(voices.size(), 0.0);
    v[std::lower_bound(voices.begin(), voices.end(), c.voice) - voices.begin()] = 1.0;
    t[c.clip_id] = {v, true};
  }
  return t;
}

DiarReport Diar(const std::string& name, const std::vector<Conversation>& convs,
                const EmbeddingTable& emb) {
  return RunDiarEval(name, convs, [&emb](const Segment& s) {
    return emb.at(s.clip_id).vector;
  });
}

std::vector<Conversation> Benchmark(const Corpus& corpus) {
  Rng rng(1337);
  return BuildBenchmark(corpus, BenchmarkOptions{}, rng);
}

void DiarSanity(const DeskRun& run) {
  const auto convs = Benchmark(run.corpus);
  const DiarReport oracle = Diar("oracle", convs, OneHot(run.corpus));
  const DiarReport pass = Diar("passthrough", convs, run.pass_emb);
  const DiarReport trained = Diar("trained", convs, run.trained_emb);
  const bool ok = oracle.ari_mean == 1.0 && oracle.cs.recall == 1.0 &&
                  !oracle.cs.vacuous && trained.cs.recall >= pass.cs.recall;
  Report(11, "diarization sanity", ok,
         Fmt("oracle ARI %.4f cs_recall %.4f; cs_recall trained %.4f >= "
             "passthrough %.4f",
             oracle.ari_mean, oracle.cs.recall, trained.cs.recall,
             pass.cs.recall) +
             Fmt(" (ARI %.4f vs %.4f)", trained.ari_mean, pass.ari_mean));
}

bool Pipeline(const fs::path& dir, std::string* why) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&dir](const char* f) { return (dir / f).string(); };
  const std::vector<std::vector<std::string>> cmds = {
      {"gen-synth", "--seed", "1337", "--clips-per-lang", "20", "--feature-dim",
       "32", "--out", p("corpus.jsonl")},
      {"gate", "--corpus", p("corpus.jsonl"), "--threshold", "0.7", "--out",
       p("gated.jsonl")},
      {"train", "--corpus", p("gated.jsonl"), "--seed", "1337", "--out",
       p("model.ckpt")},
      {"eval-gap", "--corpus", p("gated.jsonl"), "--passthrough",
       "--checkpoint", p("model.ckpt"), "--seed", "1337", "--out-dir",
       p("gap")},
      {"diar", "--corpus", p("gated.jsonl"), "--oracle", "--passthrough",
       "--checkpoint", p("model.ckpt"), "--seed", "1337", "--out-dir",
       p("diar")},
  };
  for (const auto& args : cmds) {
    std::ostringstream out, err;
    if (RunCli(args, out, err) != kExitOk) {
      *why = args[0] + " failed: " + err.str();
      return false;
    }
  }
  return true;
}

void Determinism() {
  const fs::path root = fs::current_path() / "acceptance_runs";
  std::string why;
  const bool ran = Pipeline(root / "a", &why) && Pipeline(root / "b", &why);
  std::size_t files = 0, same = 0;
  if (ran) {
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (!e.is_regular_file()) continue;
      ++files;
      const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
      same += fs::exists(other) &&
              ReadFile(e.path().string()) == ReadFile(other.string());
    }
  }
  Report(12, "determinism", ran && files > 0 && same == files,
         ran ? Fmt("%.0f/%.0f output files byte-identical across two runs",
                   same, files)
             : why);
}

void RttmRoundTrip(const DeskRun& run) {
  const auto convs = Benchmark(run.corpus);
  const std::string path = (fs::current_path() / "acceptance_benchmark.rttm").string();
  WriteRttm(convs, path);
  const auto back = ReadRttm(path);
  std::size_t total = 0, match = 0;
  const auto milli = [](double s) { return std::llround(s * 1000.0); };
  for (const auto& c : convs) {
    for (const auto& s : c.segments) {
      if (total < back.size()) {
        const RttmEntry& e = back[total];
        match += e.conversation_id == s.conversation_id &&
                 milli(e.onset_s) == milli(s.onset_s) &&
                 milli(e.duration_s) == milli(s.duration_s) &&
                 e.voice == s.voice;
      }
      ++total;
    }
  }
  Report(13, "RTTM round trip", back.size() == total && match == total,
         Fmt("%.0f/%.0f segments reproduced at millisecond precision",
             match, total));
}

}  // namespace

int main() {
  std::cout << "langadv acceptance" << std::endl;
  GradientCheck();
  GrlContract();
  LossAnchors();
  LambdaSchedule();
  TableArithmetic();
  const DeskRun run = RunDesk();
  GapClosure(run);
  Equilibrium(run);
  BootstrapSanity(run);
  ClusteringOracle();
  AriOracle();
  DiarSanity(run);
  Determinism();
  RttmRoundTrip(run);
  std::cout << "summary: " << 13 - failures << "/13 passed, " << failures
            << " failed" << std::endl;
  return 0;
}
