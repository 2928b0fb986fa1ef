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

#ifndef PROSODIFF_RNG_H_
#define PROSODIFF_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace prosodiff {

// Named substreams derived from a run seed. Every component draws from its
// own stream so that changing one consumer never shifts another.
enum class Stream : std::uint64_t {
  kCorpus = 1,
  kInit = 2,
  kTraining = 3,
  kSampling = 4,
  kEvaluation = 5,
  kTextTable = 6,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

  double Normal() { return normal_(engine_); }
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  double Uniform(double lo, double hi);
  // Uniform integer in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace prosodiff

#endif  // PROSODIFF_RNG_H_
