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

#include "langadv/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "langadv/checkpoint.hpp"
#include "langadv/corpus.hpp"
#include "langadv/diarization.hpp"
#include "langadv/error.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/io.hpp"
#include "langadv/trainer.hpp"

#ifndef LANGADV_VERSION
#define LANGADV_VERSION "0.0.0"
#endif

namespace langadv {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Header carried by every report: tool version, seed, a hash of the
// resolved settings and digests of the input files (by base name, so runs in
// different directories stay byte-identical).
json ReportHeader(const std::string& command, std::uint64_t seed,
                  const json& settings,
                  const std::vector<std::string>& input_paths) {
  json inputs = json::object();
  for (const std::string& p : input_paths) {
    inputs[fs::path(p).filename().string()] = HexDigest(ReadFile(p));
  }
  return {{"tool", "langadv"},
          {"version", LANGADV_VERSION},
          {"command", command},
          {"seed", seed},
          {"config_hash", HexDigest(settings.dump())},
          {"settings", settings},
          {"inputs", inputs}};
}

std::string TextHeader(const json& header) {
  return "# " + header["tool"].get<std::string>() + " " +
         header["version"].get<std::string>() + " " +
         header["command"].get<std::string>() +
         " seed=" + std::to_string(header["seed"].get<std::uint64_t>()) +
         " config=" + header["config_hash"].get<std::string>() + "\n";
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "'");
}

// ---------------------------------------------------------------- sources

struct EncoderSource {
  enum class Kind { kPassThrough, kCheckpoint, kTable, kOracle };
  std::string name;
  Kind kind;
  std::string path;
};

// "NAME=PATH" or "PATH" (named `fallback`).
EncoderSource ParseSource(const std::string& spec, EncoderSource::Kind kind,
                          const std::string& fallback) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) return {fallback, kind, spec};
  if (eq == 0 || eq + 1 == spec.size()) {
    throw UsageError("expected NAME=PATH, got '" + spec + "'");
  }
  return {spec.substr(0, eq), kind, spec.substr(eq + 1)};
}

struct SourceOptions {
  bool passthrough = false;
  bool oracle = false;
  std::vector<std::string> checkpoints;
  std::vector<std::string> tables;
  std::size_t embedding_dim = 0;
};

void AddSourceOptions(CLI::App* cmd, SourceOptions& o, bool with_oracle) {
  cmd->add_flag("--passthrough", o.passthrough,
                "Include the pass-through baseline (normalized mean-pooled raw "
                "features). Default when no other source is given");
  cmd->add_option("--checkpoint", o.checkpoints,
                  "Trained checkpoint as NAME=PATH or PATH (name 'trained'); "
                  "repeatable");
  cmd->add_option("--embeddings", o.tables,
                  "External embedding table (JSONL records with clip_id and "
                  "embedding) as NAME=PATH or PATH; repeatable");
  cmd->add_option("--embedding-dim", o.embedding_dim,
                  "Required dimension of external embeddings (0 = infer)")
      ->capture_default_str();
  if (with_oracle) {
    cmd->add_flag("--oracle", o.oracle,
                  "Include one-hot per-voice oracle embeddings");
  }
}

std::vector<EncoderSource> ResolveSources(const SourceOptions& o) {
  std::vector<EncoderSource> out;
  if (o.oracle) out.push_back({"oracle", EncoderSource::Kind::kOracle, ""});
  if (o.passthrough || (o.checkpoints.empty() && o.tables.empty() && !o.oracle)) {
    out.push_back({"passthrough", EncoderSource::Kind::kPassThrough, ""});
  }
  for (const auto& c : o.checkpoints) {
    out.push_back(ParseSource(c, EncoderSource::Kind::kCheckpoint, "trained"));
  }
  for (const auto& t : o.tables) {
    out.push_back(ParseSource(t, EncoderSource::Kind::kTable, "external"));
  }
  std::map<std::string, int> seen;
  for (const auto& s : out) {
    if (seen[s.name]++) throw UsageError("duplicate encoder name '" + s.name + "'");
  }
  return out;
}

EmbeddingTable ReadEmbeddingTable(const std::string& path, const Corpus& corpus,
                                  std::size_t expected_dim) {
  std::istringstream in(ReadFile(path));
  std::string line;
  std::size_t line_no = 0, dim = expected_dim;
  EmbeddingTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    std::vector<double> v;
    try {
      const json j = json::parse(line);
      id = j.at("clip_id").get<std::string>();
      v = j.at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw DataError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim || dim == 0) {
      throw DataError(path + " line " + std::to_string(line_no) +
                      ": embedding has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(dim));
    }
    table[id] = Embedding{std::move(v), false};
  }
  for (const Clip& c : corpus.clips) {
    if (!table.count(c.clip_id)) {
      throw DataError(path + ": no embedding for clip '" + c.clip_id + "'");
    }
  }
  return table;
}

EmbeddingTable OracleTable(const Corpus& corpus) {
  const auto voices = corpus.Voices();
  EmbeddingTable table;
  for (const Clip& c : corpus.clips) {
    std::vector<double> v(voices.size(), 0.0);
    const auto it = std::lower_bound(voices.begin(), voices.end(), c.voice);
    v[static_cast<std::size_t>(it - voices.begin())] = 1.0;
    table[c.clip_id] = Embedding{std::move(v), true};
  }
  return table;
}

EmbeddingTable LoadEmbeddings(const EncoderSource& s, const Corpus& corpus,
                              std::size_t expected_dim) {
  switch (s.kind) {
    case EncoderSource::Kind::kPassThrough:
      return PassThroughEmbeddings(corpus);
    case EncoderSource::Kind::kOracle:
      return OracleTable(corpus);
    case EncoderSource::Kind::kCheckpoint: {
      const Checkpoint ckpt = ReadCheckpoint(s.path);
      return EvaluateEmbeddings(ckpt.params, ckpt.config, corpus);
    }
    case EncoderSource::Kind::kTable:
      return ReadEmbeddingTable(s.path, corpus, expected_dim);
  }
  throw DataError("unknown encoder source");
}

std::vector<std::string> SourceInputs(const std::vector<EncoderSource>& sources) {
  std::vector<std::string> paths;
  for (const auto& s : sources) {
    if (!s.path.empty()) paths.push_back(s.path);
  }
  return paths;
}

// ---------------------------------------------------------------- commands

struct GenSynthArgs {
  SynthConfig synth;
  std::string out;
};

int CmdGenSynth(const GenSynthArgs& a, std::ostream& out) {
  const Corpus corpus = GenerateSynthetic(a.synth);
  WriteCorpus(corpus, a.out);
  out << "wrote " << corpus.clips.size() << " clips (" << a.synth.num_voices
      << " voices x " << kLanguages.size() << " languages x "
      << a.synth.clips_per_voice_per_lang << ") to " << a.out << "\n";
  return kExitOk;
}

struct GateArgs {
  std::string corpus;
  std::string checkpoint;
  double threshold = 0.90;
  std::string out;
  std::string report;
};

int CmdGate(const GateArgs& a, std::ostream& out) {
  const Corpus corpus = ReadCorpus(a.corpus);
  ClipEncoder encoder = PassThroughEmbed;
  std::vector<std::string> inputs = {a.corpus};
  std::optional<Checkpoint> ckpt;
  if (!a.checkpoint.empty()) {
    ckpt = ReadCheckpoint(a.checkpoint);
    if (ckpt->config.input_dim != corpus.feature_dim) {
      throw DataError("checkpoint input_dim does not match corpus feature_dim");
    }
    encoder = [&ckpt](const Clip& c) {
      return Embed(ckpt->params, ckpt->config, c.frames);
    };
    inputs.push_back(a.checkpoint);
  }
  const GateResult result = QualityGate(corpus, encoder, a.threshold);
  WriteCorpus(result.passed, a.out);
  const json settings = {{"threshold", a.threshold},
                         {"encoder", a.checkpoint.empty() ? "passthrough"
                                                          : "checkpoint"}};
  json report = json::parse(GateReportToJson(result.report));
  json doc = {{"header", ReportHeader("gate", corpus.seed, settings, inputs)},
              {"report", report}};
  const std::string report_path =
      a.report.empty() ? a.out + ".gate.json" : a.report;
  WriteFileAtomic(report_path, doc.dump(2) + "\n");
  out << "gate threshold " << a.threshold << ": kept " << result.report.passed
      << " of " << result.report.total << " clips, pass rate "
      << FormatRate(result.report.PassRate()) << " ("
      << FormatPercent(result.report.PassRate()) << ")\n";
  return kExitOk;
}

struct TrainArgs {
  TrainConfig train;
  std::string corpus;
  std::string out;
  std::string history;
  std::string resume;
};

int CmdTrain(TrainArgs a, std::ostream& out) {
  const Corpus corpus = ReadCorpus(a.corpus);
  a.train.model.input_dim = corpus.feature_dim;
  a.train.Validate();
  TrainState state;
  const std::string history_path =
      a.history.empty() ? a.out + ".history.jsonl" : a.history;
  if (!a.resume.empty()) {
    const Checkpoint ckpt = ReadCheckpoint(a.resume);
    if (!(ckpt.config == a.train.model)) {
      throw DataError("resume checkpoint model config differs from flags");
    }
    state = StateFromCheckpoint(ckpt);
    if (fs::exists(history_path)) {
      state.history = HistoryFromJsonl(ReadFile(history_path));
    }
  } else {
    state = InitTrainState(a.train);
  }
  const auto start = std::chrono::steady_clock::now();
  ContinueTraining(corpus, a.train, state, a.train.steps);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  WriteCheckpoint(a.out, CheckpointFromState(a.train.model, state));
  WriteFileAtomic(history_path, HistoryToJsonl(state.history));
  out << "trained to step " << state.step << " in " << secs << " s; ";
  if (!state.history.empty()) {
    const auto& last = state.history.back();
    out << "last l_spk=" << last.l_spk << " l_lang=" << last.l_lang
        << " lambda=" << last.lambda;
  }
  out << "\ncheckpoint: " << a.out << "\nhistory: " << history_path << "\n";
  return kExitOk;
}

struct GapArgs {
  std::string corpus;
  SourceOptions sources;
  GapOptions gap;
  std::string out_dir;
};

std::vector<ClipMeta> Metas(const Corpus& corpus) {
  std::vector<ClipMeta> metas;
  for (const Clip& c : corpus.clips) metas.push_back({c.clip_id, c.voice, c.lang});
  return metas;
}

int CmdEvalGap(const GapArgs& a, std::ostream& out) {
  const Corpus corpus = ReadCorpus(a.corpus);
  const auto sources = ResolveSources(a.sources);
  EnsureDir(a.out_dir);
  const json settings = {{"pairs", a.gap.n_pairs},
                         {"bootstrap", a.gap.bootstrap_iterations},
                         {"level", a.gap.level}};
  std::vector<std::string> inputs = {a.corpus};
  for (const auto& p : SourceInputs(sources)) inputs.push_back(p);
  const json header = ReportHeader("eval-gap", a.gap.seed, settings, inputs);

  const auto metas = Metas(corpus);
  std::string table = TextHeader(header) + GapTableHeader(a.gap.level) + "\n";
  for (const auto& s : sources) {
    const EmbeddingTable emb = LoadEmbeddings(s, corpus, a.sources.embedding_dim);
    std::vector<std::vector<double>> vecs;
    for (const Clip& c : corpus.clips) vecs.push_back(emb.at(c.clip_id).vector);
    const GapReport r = ComputeGapReport(s.name, metas, vecs, a.gap);
    json doc = {{"header", header}, {"report", json::parse(GapReportToJson(r))}};
    WriteFileAtomic((fs::path(a.out_dir) / ("gap_" + s.name + ".json")).string(),
                    doc.dump(2) + "\n");
    table += FormatGapRow(r) + "\n";
  }
  table +=
      "# delta = within - cross, M = cross - floor, from unrounded medians\n";
  WriteFileAtomic((fs::path(a.out_dir) / "gap_table.txt").string(), table);
  out << table;
  return kExitOk;
}

struct DiarArgs {
  std::string corpus;
  SourceOptions sources;
  std::size_t conversations = 50;
  std::uint64_t seed = 1337;
  std::string out_dir;
};

int CmdDiar(const DiarArgs& a, std::ostream& out) {
  const Corpus corpus = ReadCorpus(a.corpus);
  const auto sources = ResolveSources(a.sources);
  EnsureDir(a.out_dir);
  BenchmarkOptions opts;
  opts.num_conversations = a.conversations;
  Rng rng(a.seed);
  const auto convs = BuildBenchmark(corpus, opts, rng);
  WriteRttm(convs, (fs::path(a.out_dir) / "benchmark.rttm").string());

  const json settings = {{"conversations", a.conversations}};
  std::vector<std::string> inputs = {a.corpus};
  for (const auto& p : SourceInputs(sources)) inputs.push_back(p);
  const json header = ReportHeader("diar", a.seed, settings, inputs);
  std::string table = TextHeader(header) + DiarTableHeader() + "\n";
  for (const auto& s : sources) {
    const EmbeddingTable emb = LoadEmbeddings(s, corpus, a.sources.embedding_dim);
    std::vector<std::vector<int>> predicted;
    const DiarReport r = RunDiarEval(
        s.name, convs,
        [&emb](const Segment& seg) { return emb.at(seg.clip_id).vector; },
        &predicted);
    WriteFileAtomic(
        (fs::path(a.out_dir) / ("predicted_" + s.name + ".jsonl")).string(),
        PredictedLabelsToJsonl(convs, predicted));
    json doc = {{"header", header}, {"report", json::parse(DiarReportToJson(r))}};
    WriteFileAtomic((fs::path(a.out_dir) / ("diar_" + s.name + ".json")).string(),
                    doc.dump(2) + "\n");
    table += FormatDiarRow(r) + "\n";
  }
  WriteFileAtomic((fs::path(a.out_dir) / "diar_table.txt").string(), table);
  out << table;
  return kExitOk;
}

struct GradCheckArgs {
  ModelConfig model;
  ModelGradCheckOptions check;
  std::uint64_t seed = 1337;
  double tolerance = 1e-4;
};

int CmdGradCheck(const GradCheckArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const GradCheckResult r = ModelGradCheck(a.model, a.seed, a.check);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  out << "max relative error " << r.max_relative_error << " over "
      << r.coords_checked << " coordinates (epsilon " << a.check.check.epsilon
      << ", dropout off, " << secs << " s)\n";
  if (r.max_relative_error > a.tolerance) {
    out << "FAIL: exceeds tolerance " << a.tolerance << " (parameter "
        << r.worst_param << " index " << r.worst_index << ": analytic "
        << r.worst_analytic << ", numeric " << r.worst_numeric << ")\n";
    return kExitNumerical;
  }
  out << "PASS\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Language-adversarial speaker encoder toolkit", "langadv"};
  app.set_config("--config", "",
                 "Config file (TOML/INI, flat keys per subcommand section); "
                 "command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", LANGADV_VERSION);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  gen_cmd->add_option("--seed", gen.synth.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--voices", gen.synth.num_voices, "Number of voices")
      ->capture_default_str();
  gen_cmd->add_option("--clips-per-lang", gen.synth.clips_per_voice_per_lang,
                      "Clips per voice per language")
      ->capture_default_str();
  gen_cmd->add_option("--feature-dim", gen.synth.feature_dim, "Frame feature dimension")
      ->capture_default_str();
  gen_cmd->add_option("--frames-min", gen.synth.frames_min, "Minimum frames per clip")
      ->capture_default_str();
  gen_cmd->add_option("--frames-max", gen.synth.frames_max, "Maximum frames per clip")
      ->capture_default_str();
  gen_cmd->add_option("--speaker-scale", gen.synth.speaker_scale,
                      "Weight of the voice direction")
      ->capture_default_str();
  gen_cmd->add_option("--lang-scale", gen.synth.language_scale,
                      "Weight of the language direction")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen.synth.noise_scale, "Per-frame noise norm")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output corpus file")->required();

  GateArgs gate;
  auto* gate_cmd = app.add_subcommand("gate", "Cosine quality gate against each "
                                              "voice's first English clip");
  gate_cmd->add_option("--corpus", gate.corpus, "Input corpus")->required();
  gate_cmd->add_option("--checkpoint", gate.checkpoint,
                       "Gate with a trained encoder instead of pass-through");
  gate_cmd->add_option("--threshold", gate.threshold, "Cosine threshold")
      ->capture_default_str();
  gate_cmd->add_option("--out", gate.out, "Gated corpus output")->required();
  gate_cmd->add_option("--report", gate.report,
                       "Report path (default <out>.gate.json)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the projection head and "
                                                "language adversary");
  train_cmd->add_option("--corpus", train.corpus, "Training corpus")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint output")->required();
  train_cmd->add_option("--history", train.history,
                        "Loss history (default <out>.history.jsonl)");
  train_cmd->add_option("--resume", train.resume,
                        "Continue from a checkpoint up to --steps");
  train_cmd->add_option("--steps", train.train.steps, "Training steps")
      ->capture_default_str();
  train_cmd->add_option("--batch-size", train.train.batch_size, "Batch size")
      ->capture_default_str();
  train_cmd->add_option("--voices-per-batch", train.train.voices_per_batch,
                        "Distinct voices per batch")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.train.seed, "Random seed")
      ->capture_default_str();
  train_cmd->add_option("--lr", train.train.optim.learning_rate, "AdamW learning rate")
      ->capture_default_str();
  train_cmd->add_option("--weight-decay", train.train.optim.weight_decay,
                        "Decoupled weight decay (weights only)")
      ->capture_default_str();
  train_cmd->add_option("--beta1", train.train.optim.beta1, "AdamW beta1")
      ->capture_default_str();
  train_cmd->add_option("--beta2", train.train.optim.beta2, "AdamW beta2")
      ->capture_default_str();
  train_cmd->add_option("--adam-eps", train.train.optim.epsilon, "AdamW epsilon")
      ->capture_default_str();
  train_cmd->add_option("--clip-norm", train.train.optim.clip_norm,
                        "Gradient clipping norm")
      ->capture_default_str();
  train_cmd->add_option("--temperature", train.train.loss.temperature,
                        "Contrastive temperature")
      ->capture_default_str();
  train_cmd->add_option("--warmup", train.train.loss.warmup_steps,
                        "Steps with lambda = 0")
      ->capture_default_str();
  train_cmd->add_option("--ramp", train.train.loss.ramp_steps,
                        "Steps of the linear lambda ramp")
      ->capture_default_str();
  train_cmd->add_option("--lambda-max", train.train.loss.lambda_max,
                        "Lambda after the ramp")
      ->capture_default_str();
  train_cmd->add_flag("--unit-lang-weight", train.train.loss.unit_lang_weight,
                      "Add the language loss with weight 1 instead of lambda");
  train_cmd->add_option("--hidden-dim", train.train.model.hidden_dim,
                        "Projection hidden width")
      ->capture_default_str();
  train_cmd->add_option("--embed-dim", train.train.model.embed_dim,
                        "Embedding dimension")
      ->capture_default_str();
  train_cmd->add_option("--classifier-hidden", train.train.model.classifier_hidden,
                        "Language classifier hidden width")
      ->capture_default_str();
  train_cmd->add_option("--dropout", train.train.model.dropout_rate,
                        "Dropout after the hidden ReLU")
      ->capture_default_str();

  GapArgs gap;
  auto* gap_cmd = app.add_subcommand("eval-gap", "Within/cross/floor cosine "
                                                 "medians, gap and margin");
  gap_cmd->add_option("--corpus", gap.corpus, "Evaluation corpus")->required();
  AddSourceOptions(gap_cmd, gap.sources, false);
  gap_cmd->add_option("--pairs", gap.gap.n_pairs, "Pairs sampled per bucket")
      ->capture_default_str();
  gap_cmd->add_option("--bootstrap", gap.gap.bootstrap_iterations,
                      "Bootstrap iterations")
      ->capture_default_str();
  gap_cmd->add_option("--level", gap.gap.level, "Confidence level")
      ->capture_default_str();
  gap_cmd->add_option("--seed", gap.gap.seed, "Random seed")->capture_default_str();
  gap_cmd->add_option("--out-dir", gap.out_dir, "Report directory")->required();

  DiarArgs diar;
  auto* diar_cmd = app.add_subcommand("diar", "Synthetic code-switching "
                                              "diarization benchmark");
  diar_cmd->add_option("--corpus", diar.corpus, "Held-out corpus")->required();
  AddSourceOptions(diar_cmd, diar.sources, true);
  diar_cmd->add_option("--conversations", diar.conversations,
                       "Number of conversations")
      ->capture_default_str();
  diar_cmd->add_option("--seed", diar.seed, "Random seed")->capture_default_str();
  diar_cmd->add_option("--out-dir", diar.out_dir, "Output directory")->required();

  GradCheckArgs gc;
  gc.check.check.max_coords_per_tensor = 256;
  auto* gc_cmd = app.add_subcommand("grad-check", "Finite-difference check of "
                                                  "the full training graph");
  gc_cmd->add_option("--epsilon", gc.check.check.epsilon, "Central-difference step")
      ->capture_default_str();
  gc_cmd->add_option("--coords", gc.check.check.max_coords_per_tensor,
                     "Coordinates per parameter tensor (0 = all)")
      ->capture_default_str();
  gc_cmd->add_option("--lambda", gc.check.lambda, "Gradient-reversal strength")
      ->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance, "Maximum relative error")
      ->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
  gc_cmd->add_option("--input-dim", gc.model.input_dim, "Input feature dimension")
      ->capture_default_str();
  gc_cmd->add_option("--hidden-dim", gc.model.hidden_dim, "Projection hidden width")
      ->capture_default_str();
  gc_cmd->add_option("--embed-dim", gc.model.embed_dim, "Embedding dimension")
      ->capture_default_str();
  gc_cmd->add_option("--classifier-hidden", gc.model.classifier_hidden,
                     "Classifier hidden width")
      ->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return CmdGenSynth(gen, out);
    if (gate_cmd->parsed()) return CmdGate(gate, out);
    if (train_cmd->parsed()) return CmdTrain(train, out);
    if (gap_cmd->parsed()) return CmdEvalGap(gap, out);
    if (diar_cmd->parsed()) return CmdDiar(diar, out);
    if (gc_cmd->parsed()) return CmdGradCheck(gc, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace langadv
