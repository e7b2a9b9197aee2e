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

#include "langadv/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "langadv/error.hpp"
#include "langadv/io.hpp"

namespace langadv {

namespace {

constexpr char kMagic[] = "LADV1";
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
void PutLE(std::string& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (std::size_t i = 0; i < sizeof bits; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    Need(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof bits; ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i]))
              << (8 * i);
    }
    pos_ += sizeof bits;
    T value;
    std::memcpy(&value, &bits, sizeof value);
    return value;
  }

  std::string Raw(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint: truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void PutTensor(std::string& out, const Tensor& t) {
  PutLE<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) PutLE<std::int64_t>(out, static_cast<std::int64_t>(d));
  for (double x : t.data()) PutLE<double>(out, x);
}

Tensor GetTensor(Reader& in, const Shape& expected) {
  const auto rank = in.Get<std::uint32_t>();
  if (rank == 0 || rank > 8) throw DataError("checkpoint: bad tensor rank");
  Shape shape;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const auto d = in.Get<std::int64_t>();
    if (d <= 0) throw DataError("checkpoint: bad tensor dimension");
    shape.push_back(static_cast<std::size_t>(d));
  }
  if (shape != expected) {
    throw DataError("checkpoint: tensor shape " + ShapeToString(shape) +
                    ", expected " + ShapeToString(expected));
  }
  std::vector<double> data(ShapeNumel(shape));
  for (double& x : data) x = in.Get<double>();
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  ckpt.config.Validate();
  ckpt.params.CheckShapes(ckpt.config);
  std::string out(kMagic, 5);
  PutLE<std::uint32_t>(out, kVersion);
  const ModelConfig& c = ckpt.config;
  for (std::size_t d : {c.input_dim, c.hidden_dim, c.embed_dim,
                        c.classifier_hidden, c.num_languages}) {
    PutLE<std::int64_t>(out, static_cast<std::int64_t>(d));
  }
  PutLE<double>(out, c.dropout_rate);
  for (const Tensor* t : ckpt.params.All()) PutTensor(out, *t);
  if (ckpt.optim) {
    const OptimState& s = *ckpt.optim;
    if (s.m.size() != ModelParams::kNumTensors ||
        s.v.size() != ModelParams::kNumTensors) {
      throw DataError("checkpoint: optimizer state has wrong tensor count");
    }
    out += "OPT1";
    PutLE<std::int64_t>(out, s.step_count);
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      PutTensor(out, s.m[i]);
      PutTensor(out, s.v[i]);
    }
  }
  if (ckpt.trainer) {
    out += "TRN1";
    PutLE<std::int64_t>(out, ckpt.trainer->step);
    PutLE<std::uint64_t>(out, ckpt.trainer->sampler_rng_state);
    PutLE<std::uint64_t>(out, ckpt.trainer->dropout_rng_state);
  }
  return out;
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  Reader in(bytes);
  if (in.Raw(5) != std::string(kMagic, 5)) {
    throw DataError("checkpoint: bad magic (expected LADV1)");
  }
  const auto version = in.Get<std::uint32_t>();
  if (version != kVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  std::int64_t dims[5];
  for (auto& d : dims) {
    d = in.Get<std::int64_t>();
    if (d < 1) throw DataError("checkpoint: bad config dimension");
  }
  ckpt.config.input_dim = static_cast<std::size_t>(dims[0]);
  ckpt.config.hidden_dim = static_cast<std::size_t>(dims[1]);
  ckpt.config.embed_dim = static_cast<std::size_t>(dims[2]);
  ckpt.config.classifier_hidden = static_cast<std::size_t>(dims[3]);
  ckpt.config.num_languages = static_cast<std::size_t>(dims[4]);
  ckpt.config.dropout_rate = in.Get<double>();
  ckpt.config.Validate();

  const ModelParams shapes = ZeroParams(ckpt.config);
  const auto expected = shapes.All();
  auto slots = ckpt.params.All();
  for (std::size_t i = 0; i < ModelParams::kNumTensors; ++i) {
    *slots[i] = GetTensor(in, expected[i]->shape());
  }
  while (!in.AtEnd()) {
    const std::string tag = in.Raw(4);
    if (tag == "OPT1") {
      OptimState s;
      s.step_count = in.Get<std::int64_t>();
      for (std::size_t i = 0; i < ModelParams::kNumTensors; ++i) {
        s.m.push_back(GetTensor(in, expected[i]->shape()));
        s.v.push_back(GetTensor(in, expected[i]->shape()));
      }
      ckpt.optim = std::move(s);
    } else if (tag == "TRN1") {
      Checkpoint::TrainerSection t;
      t.step = in.Get<std::int64_t>();
      t.sampler_rng_state = in.Get<std::uint64_t>();
      t.dropout_rng_state = in.Get<std::uint64_t>();
      ckpt.trainer = t;
    } else {
      throw DataError("checkpoint: unknown section tag");
    }
  }
  return ckpt;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  WriteFileAtomic(path, SerializeCheckpoint(ckpt));
}

Checkpoint ReadCheckpoint(const std::string& path) {
  return DeserializeCheckpoint(ReadFile(path));
}

Checkpoint CheckpointFromState(const ModelConfig& config,
                               const TrainState& state) {
  Checkpoint c;
  c.config = config;
  c.params = state.params;
  c.optim = state.optim;
  c.trainer = Checkpoint::TrainerSection{state.step, state.sampler_rng_state,
                                         state.dropout_rng_state};
  return c;
}

TrainState StateFromCheckpoint(const Checkpoint& ckpt) {
  if (!ckpt.optim || !ckpt.trainer) {
    throw DataError("checkpoint lacks optimizer/trainer state for resuming");
  }
  TrainState s;
  s.params = ckpt.params;
  s.optim = *ckpt.optim;
  s.step = ckpt.trainer->step;
  s.sampler_rng_state = ckpt.trainer->sampler_rng_state;
  s.dropout_rng_state = ckpt.trainer->dropout_rng_state;
  return s;
}

}  // namespace langadv
