// Copyright (c) 2026 The prosodiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosodiff/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace prosodiff {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void Put(std::string* out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out->append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string GetString(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void GetDoubles(double* dst, std::size_t n) {
    Need(n * sizeof(double));
    std::memcpy(dst, bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw std::runtime_error("checkpoint truncated");
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const std::vector<NamedTensor>& entries) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  Put<std::uint32_t>(&out, kCheckpointVersion);
  Put<std::uint64_t>(&out, entries.size());
  for (const auto& e : entries) {
    Put<std::uint32_t>(&out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    Put<std::uint32_t>(&out, static_cast<std::uint32_t>(e.tensor.rank()));
    for (std::size_t d : e.tensor.shape()) Put<std::uint64_t>(&out, d);
    out.append(reinterpret_cast<const char*>(e.tensor.data()),
               e.tensor.size() * sizeof(double));
  }
  return out;
}

std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.GetString(sizeof(kCheckpointMagic)) !=
      std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw std::runtime_error("not a prosodiff checkpoint (bad magic)");
  }
  const auto version = r.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  const auto count = r.Get<std::uint64_t>();
  std::vector<NamedTensor> entries;
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedTensor e;
    e.name = r.GetString(r.Get<std::uint32_t>());
    const auto rank = r.Get<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.Get<std::uint64_t>();
    e.tensor = Tensor(shape);
    r.GetDoubles(e.tensor.data(), e.tensor.size());
    entries.push_back(std::move(e));
  }
  if (!r.done()) throw std::runtime_error("trailing bytes in checkpoint");
  return entries;
}

void WriteCheckpoint(const std::string& path,
                     const std::vector<NamedTensor>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  const std::string bytes = EncodeCheckpoint(entries);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

std::vector<NamedTensor> ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes);
}

void AppendParameters(const ParameterSet& params, const std::string& prefix,
                      bool with_optimizer_state,
                      std::vector<NamedTensor>* entries) {
  for (const Parameter* p : params.All()) {
    entries->push_back({prefix + p->name, p->tensor().Reshaped(p->tensor().shape())});
    if (with_optimizer_state) {
      entries->push_back({prefix + p->name + "@m",
                          Tensor(p->tensor().shape(), p->first_moment)});
      entries->push_back({prefix + p->name + "@v",
                          Tensor(p->tensor().shape(), p->second_moment)});
      entries->push_back({prefix + p->name + "@step",
                          Tensor::Scalar(static_cast<double>(p->step_counter))});
    }
  }
}

void RestoreParameters(const std::vector<NamedTensor>& entries,
                       const std::string& prefix, ParameterSet* params) {
  std::unordered_map<std::string, const Tensor*> by_name;
  for (const auto& e : entries) by_name[e.name] = &e.tensor;
  auto lookup = [&](const std::string& name) -> const Tensor* {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : it->second;
  };
  for (Parameter* p : params->All()) {
    const Tensor* t = lookup(prefix + p->name);
    if (!t) throw std::runtime_error("checkpoint lacks " + prefix + p->name);
    if (t->shape() != p->tensor().shape()) {
      throw std::runtime_error("checkpoint shape mismatch for " + prefix +
                               p->name + ": " + ShapeToString(t->shape()) +
                               " vs " + ShapeToString(p->tensor().shape()));
    }
    std::copy(t->values().begin(), t->values().end(),
              p->tensor().values().begin());
    p->tensor().ClearGrad();
    const Tensor* m = lookup(prefix + p->name + "@m");
    const Tensor* v = lookup(prefix + p->name + "@v");
    const Tensor* step = lookup(prefix + p->name + "@step");
    if (m && v && step) {
      p->first_moment.assign(m->values().begin(), m->values().end());
      p->second_moment.assign(v->values().begin(), v->values().end());
      p->step_counter = static_cast<std::int64_t>((*step)[0]);
    } else {
      p->first_moment.assign(p->tensor().size(), 0.0);
      p->second_moment.assign(p->tensor().size(), 0.0);
      p->step_counter = 0;
    }
  }
}

const NamedTensor& FindEntry(const std::vector<NamedTensor>& entries,
                             const std::string& name) {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw std::runtime_error("checkpoint lacks entry " + name);
}

}  // namespace prosodiff
