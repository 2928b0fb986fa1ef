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

#ifndef PROSODIFF_CONFIG_H_
#define PROSODIFF_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prosodiff/corpus.h"
#include "prosodiff/denoiser.h"
#include "prosodiff/guidance.h"
#include "prosodiff/parameter.h"
#include "prosodiff/style.h"

namespace prosodiff {

struct TrainConfig {
  int steps = 6000;
  int batch_size = 16;
  AdamConfig adam{2e-3, 0.9, 0.999, 1e-8};
  int checkpoint_every = 1000;

  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EvalConfig {
  std::vector<double> eta_sweep = {1.0, 3.0, 5.0, 7.0};
  int cv_samples = 24;
  int samples_per_token = 50;
  std::vector<double> transfer_etas = {0.5, 1.0, 2.0};
  int transfer_samples = 24;
  int baseline_repeats = 20;
  // Held-out utterances used for the divergence report; 0 means all.
  int js_utterances = 0;

  void Validate() const;
  bool operator==(const EvalConfig&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 7;
  std::string output_dir = "runs/default";
  CorpusConfig corpus;
  DenoiserConfig denoiser;
  // One style token per corpus archetype at desk scale.
  StyleConfig style{.token_count = 4};
  GuidanceParams guidance;
  int diffusion_steps = 200;
  TrainConfig train;
  EvalConfig eval;

  void Validate() const;
  bool operator==(const RunConfig&) const = default;
};

// JSON text with a fixed key order; ParseRunConfig(ToJson(c)) == c. Missing
// keys keep their defaults; unknown keys are errors.
std::string RunConfigToJson(const RunConfig& config);
RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);
void SaveRunConfig(const RunConfig& config, const std::string& path);

}  // namespace prosodiff

#endif  // PROSODIFF_CONFIG_H_
