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

#ifndef PROSODIFF_MODEL_H_
#define PROSODIFF_MODEL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prosodiff/config.h"
#include "prosodiff/corpus.h"
#include "prosodiff/denoiser.h"
#include "prosodiff/guidance.h"
#include "prosodiff/schedule.h"
#include "prosodiff/style.h"

namespace prosodiff {

// Conditional and unconditional denoisers, the style token bank, the fixed
// phoneme table, the noise schedule and the feature statistics of one run.
class ProsodyModel {
 public:
  // Fresh parameters drawn from the run seed.
  ProsodyModel(const RunConfig& config, const NormalizationStats& stats);
  ProsodyModel(ProsodyModel&&) = default;
  ProsodyModel& operator=(ProsodyModel&&) = default;

  // Restores parameters, optimizer state, statistics and the step counter.
  // Throws if the checkpoint does not fit `config`.
  static ProsodyModel Load(const std::string& path, const RunConfig& config);
  void Save(const std::string& path) const;

  const RunConfig& config() const { return config_; }
  Denoiser& conditional() { return conditional_; }
  const Denoiser& conditional() const { return conditional_; }
  Denoiser& unconditional() { return unconditional_; }
  const Denoiser& unconditional() const { return unconditional_; }
  StyleBank& bank() { return bank_; }
  const StyleBank& bank() const { return bank_; }
  const TextEmbedder& text() const { return text_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const NormalizationStats& stats() const { return stats_; }
  int step() const { return step_; }
  void set_step(int step) { step_ = step; }

  // Style of a raw (denormalized) reference utterance.
  std::pair<StyleCondition, TokenWeights> EncodeReference(
      const ProsodySequence& reference) const;

 private:
  ProsodyModel(const RunConfig& config, const NormalizationStats& stats,
               Rng&& init);

  RunConfig config_;
  NormalizationStats stats_;
  Denoiser conditional_;
  Denoiser unconditional_;
  StyleBank bank_;
  TextEmbedder text_;
  NoiseSchedule schedule_;
  int step_ = 0;
};

struct GenerationRequest {
  std::vector<int> phoneme_ids;
  // Absent: unconditional sampling through the unconditional denoiser.
  std::optional<StyleCondition> style;
  GuidanceParams guidance;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  // Replace the phoneme embedding with zeros at sampling time.
  bool zero_text = false;
  // Post-hoc factors on the linear scale of pitch, energy and duration.
  std::array<double, 3> scale{1.0, 1.0, 1.0};
};

// Samples one sequence and returns it denormalized. The sampling generator
// is derived from (seed, index).
ProsodySequence Generate(const ProsodyModel& model,
                         const GenerationRequest& request,
                         std::vector<StepDiagnostics>* diagnostics = nullptr);

// Multiplies the linear-scale value of each channel by its factor: log
// channels are shifted by log(factor), energy is multiplied.
ProsodySequence ApplyScaling(const ProsodySequence& x,
                             const std::array<double, 3>& factors);

std::string DiagnosticsToCsv(const std::vector<StepDiagnostics>& diagnostics);

}  // namespace prosodiff

#endif  // PROSODIFF_MODEL_H_
