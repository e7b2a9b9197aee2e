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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "langadv/checkpoint.hpp"
#include "langadv/cli.hpp"
#include "langadv/corpus.hpp"
#include "langadv/diarization.hpp"
#include "langadv/error.hpp"
#include "langadv/gap_eval.hpp"
#include "langadv/model.hpp"
#include "langadv/objective.hpp"
#include "langadv/rng.hpp"
#include "langadv/trainer.hpp"

namespace py = pybind11;
using namespace langadv;

namespace {

py::object Loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

// A trained or loaded model: configuration plus parameters.
struct Model {
  ModelConfig config;
  ModelParams params;
};

using Table = std::map<std::string, std::vector<double>>;

Table ToTable(const EmbeddingTable& emb) {
  Table out;
  for (const auto& [id, e] : emb) out[id] = e.vector;
  return out;
}

std::vector<double> Lookup(const Table& table, const std::string& clip_id) {
  const auto it = table.find(clip_id);
  if (it == table.end()) throw DataError("no embedding for clip " + clip_id);
  return it->second;
}

Tensor FramesFromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DataError("frames must have at least one row");
  return Tensor::FromRows(rows);
}

std::vector<std::vector<double>> Rows(const Tensor& t) {
  std::vector<std::vector<double>> rows(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) rows[r].push_back(t.at(r, c));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Language-adversarial speaker embedding toolkit";
  m.attr("__version__") = LANGADV_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", data.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<Clip>(m, "Clip")
      .def_readonly("clip_id", &Clip::clip_id)
      .def_readonly("voice", &Clip::voice)
      .def_readonly("lang", &Clip::lang)
      .def_readonly("duration_s", &Clip::duration_s)
      .def_property_readonly("frames", [](const Clip& c) { return Rows(c.frames); });

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("name", &Corpus::name)
      .def_readonly("seed", &Corpus::seed)
      .def_readonly("feature_dim", &Corpus::feature_dim)
      .def_readonly("clips", &Corpus::clips)
      .def("voices", &Corpus::Voices)
      .def("__len__", [](const Corpus& c) { return c.clips.size(); })
      .def("to_jsonl", &CorpusToString);

  m.def(
      "generate_synthetic",
      [](std::uint64_t seed, std::size_t voices, std::size_t clips_per_lang,
         std::size_t feature_dim, std::size_t frames_min, std::size_t frames_max,
         double speaker_scale, double language_scale, double noise_scale) {
        SynthConfig c;
        c.seed = seed;
        c.num_voices = voices;
        c.clips_per_voice_per_lang = clips_per_lang;
        c.feature_dim = feature_dim;
        c.frames_min = frames_min;
        c.frames_max = frames_max;
        c.speaker_scale = speaker_scale;
        c.language_scale = language_scale;
        c.noise_scale = noise_scale;
        return GenerateSynthetic(c);
      },
      py::arg("seed") = 1337, py::arg("voices") = 8,
      py::arg("clips_per_lang") = 50, py::arg("feature_dim") = 768,
      py::arg("frames_min") = 4, py::arg("frames_max") = 12,
      py::arg("speaker_scale") = 1.0, py::arg("language_scale") = 0.5,
      py::arg("noise_scale") = 0.1);
  m.def("read_corpus", &ReadCorpus, py::arg("path"));
  m.def("write_corpus", &WriteCorpus, py::arg("corpus"), py::arg("path"));
  m.def("corpus_from_jsonl", &CorpusFromString, py::arg("text"));

  m.def(
      "quality_gate",
      [](const Corpus& corpus, double threshold, const Model* model) {
        ClipEncoder enc = PassThroughEmbed;
        if (model != nullptr) {
          enc = [model](const Clip& c) {
            return Embed(model->params, model->config, c.frames);
          };
        }
        GateResult r = QualityGate(corpus, enc, threshold);
        return py::make_tuple(std::move(r.passed), Loads(GateReportToJson(r.report)));
      },
      py::arg("corpus"), py::arg("threshold") = 0.90,
      py::arg("model") = nullptr);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("steps", &TrainConfig::steps)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("voices_per_batch", &TrainConfig::voices_per_batch)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_property(
          "input_dim", [](const TrainConfig& c) { return c.model.input_dim; },
          [](TrainConfig& c, std::size_t v) { c.model.input_dim = v; })
      .def_property(
          "hidden_dim", [](const TrainConfig& c) { return c.model.hidden_dim; },
          [](TrainConfig& c, std::size_t v) { c.model.hidden_dim = v; })
      .def_property(
          "embed_dim", [](const TrainConfig& c) { return c.model.embed_dim; },
          [](TrainConfig& c, std::size_t v) { c.model.embed_dim = v; })
      .def_property(
          "classifier_hidden",
          [](const TrainConfig& c) { return c.model.classifier_hidden; },
          [](TrainConfig& c, std::size_t v) { c.model.classifier_hidden = v; })
      .def_property(
          "dropout", [](const TrainConfig& c) { return c.model.dropout_rate; },
          [](TrainConfig& c, double v) { c.model.dropout_rate = v; })
      .def_property(
          "temperature", [](const TrainConfig& c) { return c.loss.temperature; },
          [](TrainConfig& c, double v) { c.loss.temperature = v; })
      .def_property(
          "warmup", [](const TrainConfig& c) { return c.loss.warmup_steps; },
          [](TrainConfig& c, std::int64_t v) { c.loss.warmup_steps = v; })
      .def_property(
          "ramp", [](const TrainConfig& c) { return c.loss.ramp_steps; },
          [](TrainConfig& c, std::int64_t v) { c.loss.ramp_steps = v; })
      .def_property(
          "lambda_max", [](const TrainConfig& c) { return c.loss.lambda_max; },
          [](TrainConfig& c, double v) { c.loss.lambda_max = v; })
      .def_property(
          "unit_lang_weight",
          [](const TrainConfig& c) { return c.loss.unit_lang_weight; },
          [](TrainConfig& c, bool v) { c.loss.unit_lang_weight = v; })
      .def_property(
          "lr", [](const TrainConfig& c) { return c.optim.learning_rate; },
          [](TrainConfig& c, double v) { c.optim.learning_rate = v; })
      .def_property(
          "weight_decay", [](const TrainConfig& c) { return c.optim.weight_decay; },
          [](TrainConfig& c, double v) { c.optim.weight_decay = v; })
      .def_property(
          "clip_norm", [](const TrainConfig& c) { return c.optim.clip_norm; },
          [](TrainConfig& c, double v) { c.optim.clip_norm = v; });

  py::class_<TrainRecord>(m, "TrainRecord")
      .def_readonly("step", &TrainRecord::step)
      .def_readonly("l_spk", &TrainRecord::l_spk)
      .def_readonly("l_lang", &TrainRecord::l_lang)
      .def_readonly("lambda_", &TrainRecord::lambda)
      .def_readonly("clip_scale", &TrainRecord::clip_scale);

  py::class_<Model>(m, "Model")
      .def_property_readonly("input_dim", [](const Model& x) { return x.config.input_dim; })
      .def_property_readonly("embed_dim", [](const Model& x) { return x.config.embed_dim; })
      .def_property_readonly("parameter_count",
                             [](const Model& x) { return x.params.ParameterCount(); })
      .def("embed",
           [](const Model& x, const std::vector<std::vector<double>>& frames) {
             return Embed(x.params, x.config, FramesFromRows(frames)).vector;
           })
      .def("save", [](const Model& x, const std::string& path) {
        WriteCheckpoint(path, Checkpoint{x.config, x.params, std::nullopt, std::nullopt});
      });

  m.def(
      "train",
      [](const Corpus& corpus, TrainConfig config) {
        if (config.model.input_dim != corpus.feature_dim) {
          config.model.input_dim = corpus.feature_dim;
        }
        TrainState state;
        {
          py::gil_scoped_release release;
          state = Train(corpus, config);
        }
        return py::make_tuple(Model{config.model, std::move(state.params)},
                              std::move(state.history));
      },
      py::arg("corpus"), py::arg("config") = TrainConfig{},
      "Train on the corpus; returns (model, history). input_dim follows the "
      "corpus.");
  m.def(
      "load_model",
      [](const std::string& path) {
        Checkpoint c = ReadCheckpoint(path);
        return Model{c.config, std::move(c.params)};
      },
      py::arg("path"));

  m.def(
      "evaluate_embeddings",
      [](const Model& x, const Corpus& corpus) {
        return ToTable(EvaluateEmbeddings(x.params, x.config, corpus));
      },
      py::arg("model"), py::arg("corpus"));
  m.def(
      "passthrough_embeddings",
      [](const Corpus& corpus) { return ToTable(PassThroughEmbeddings(corpus)); },
      py::arg("corpus"));

  m.def(
      "gap_report",
      [](const Corpus& corpus, const Table& embeddings, const std::string& name,
         std::size_t pairs, std::size_t bootstrap, double level, std::uint64_t seed) {
        std::vector<ClipMeta> metas;
        std::vector<std::vector<double>> vecs;
        for (const Clip& c : corpus.clips) {
          metas.push_back({c.clip_id, c.voice, c.lang});
          vecs.push_back(Lookup(embeddings, c.clip_id));
        }
        GapOptions o;
        o.n_pairs = pairs;
        o.bootstrap_iterations = bootstrap;
        o.level = level;
        o.seed = seed;
        return Loads(GapReportToJson(ComputeGapReport(name, metas, vecs, o)));
      },
      py::arg("corpus"), py::arg("embeddings"), py::arg("name") = "encoder",
      py::arg("pairs") = 200, py::arg("bootstrap") = 1000,
      py::arg("level") = 0.95, py::arg("seed") = 1337);
  m.def(
      "gap_from_medians",
      [](double within, double cross, double floor) {
        return Loads(GapReportToJson(GapFromMedians("medians", within, cross, floor)));
      },
      py::arg("within"), py::arg("cross"), py::arg("floor"));

  m.def(
      "diar_eval",
      [](const Corpus& corpus, const Table& embeddings, const std::string& name,
         std::size_t conversations, std::uint64_t seed) {
        BenchmarkOptions o;
        o.num_conversations = conversations;
        Rng rng(seed);
        const auto convs = BuildBenchmark(corpus, o, rng);
        const DiarReport r = RunDiarEval(name, convs, [&](const Segment& s) {
          return Lookup(embeddings, s.clip_id);
        });
        return Loads(DiarReportToJson(r));
      },
      py::arg("corpus"), py::arg("embeddings"), py::arg("name") = "encoder",
      py::arg("conversations") = 50, py::arg("seed") = 1337);
  m.def(
      "benchmark_rttm",
      [](const Corpus& corpus, std::size_t conversations, std::uint64_t seed) {
        BenchmarkOptions o;
        o.num_conversations = conversations;
        Rng rng(seed);
        return RttmToString(BuildBenchmark(corpus, o, rng));
      },
      py::arg("corpus"), py::arg("conversations") = 50, py::arg("seed") = 1337);
  m.def("agglomerative_cluster", &AgglomerativeCluster, py::arg("embeddings"),
        py::arg("k"));
  m.def("adjusted_rand_index", &AdjustedRandIndex, py::arg("predicted"),
        py::arg("truth"));

  m.def(
      "lambda_at",
      [](std::int64_t step, std::int64_t warmup, std::int64_t ramp, double lambda_max) {
        LossConfig c;
        c.warmup_steps = warmup;
        c.ramp_steps = ramp;
        c.lambda_max = lambda_max;
        return LambdaAt(step, c);
      },
      py::arg("step"), py::arg("warmup") = 200, py::arg("ramp") = 500,
      py::arg("lambda_max") = 0.1);

  m.def(
      "grad_check",
      [](std::size_t input_dim, std::size_t hidden_dim, std::size_t embed_dim,
         std::size_t classifier_hidden, std::size_t coords, double epsilon,
         double lambda, std::uint64_t seed) {
        ModelConfig c;
        c.input_dim = input_dim;
        c.hidden_dim = hidden_dim;
        c.embed_dim = embed_dim;
        c.classifier_hidden = classifier_hidden;
        ModelGradCheckOptions o;
        o.lambda = lambda;
        o.check.epsilon = epsilon;
        o.check.max_coords_per_tensor = coords;
        GradCheckResult r;
        {
          py::gil_scoped_release release;
          r = ModelGradCheck(c, seed, o);
        }
        py::dict d;
        d["max_relative_error"] = r.max_relative_error;
        d["coords_checked"] = r.coords_checked;
        d["worst_param"] = r.worst_param;
        d["worst_index"] = r.worst_index;
        return d;
      },
      py::arg("input_dim") = 768, py::arg("hidden_dim") = 512,
      py::arg("embed_dim") = 256, py::arg("classifier_hidden") = 128,
      py::arg("coords") = 256, py::arg("epsilon") = 1e-5,
      py::arg("lambda_") = 0.1, py::arg("seed") = 1337);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = RunCli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a langadv command; returns (exit_code, stdout, stderr).");
}
