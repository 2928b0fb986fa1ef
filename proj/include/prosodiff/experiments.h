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

#ifndef PROSODIFF_EXPERIMENTS_H_
#define PROSODIFF_EXPERIMENTS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prosodiff/eval.h"
#include "prosodiff/model.h"

namespace prosodiff {

enum class SamplingPath { kConditional, kUnconditional, kZeroText };

// One generated sequence per utterance, using the utterance's text and, for
// the guided paths, its own prosody as the style reference. Sequence i uses
// sampling index i.
std::vector<ProsodySequence> GenerateForUtterances(
    const ProsodyModel& model, std::span<const Utterance* const> utterances,
    SamplingPath path, const GuidanceParams& params, std::uint64_t seed);

struct DivergenceRow {
  std::string path;
  std::array<double, 3> grouped{};  // averaged over styles
  std::array<double, 3> pooled{};
};

// Divergence of each sampling path against the same utterances.
std::vector<DivergenceRow> EvaluateDivergence(
    const ProsodyModel& model, std::span<const Utterance* const> utterances,
    std::span<const SamplingPath> paths, const GuidanceParams& params,
    std::uint64_t seed);

struct CvRow {
  double eta = 0.0;
  std::array<double, 3> cv{};  // mean per-sample CV on the linear scale
};

// For every eta, sample i uses text and reference from utterances[i % n]
// under the same sampling index, so the sweep differs only in eta.
std::vector<CvRow> CvSweep(const ProsodyModel& model,
                           std::span<const Utterance* const> utterances,
                           std::span<const double> etas,
                           const GuidanceParams& base, int samples,
                           std::uint64_t seed);

// Style of `reference` applied to the texts of `texts`.
std::vector<CvRow> TransferSweep(const ProsodyModel& model,
                                 const Utterance& reference,
                                 std::span<const Utterance* const> texts,
                                 std::span<const double> etas,
                                 const GuidanceParams& base, int samples,
                                 std::uint64_t seed);

struct TokenControlResult {
  double accuracy = 0.0;
  // Mean accuracy after shuffling the labels.
  double random_baseline = 0.0;
  std::vector<ProsodyDescriptor> descriptors;
  std::vector<int> labels;
};

// Generates `samples_per_token` sequences per one-hot token and scores how
// well the descriptors separate by token.
TokenControlResult EvaluateTokenControl(
    const ProsodyModel& model, std::span<const Utterance* const> texts,
    int samples_per_token, const GuidanceParams& params, int baseline_repeats,
    std::uint64_t seed);

// Archetype ids with the largest and smallest pitch contour amplitude.
int HighVariationStyle(const Corpus& corpus);
int LowVariationStyle(const Corpus& corpus);
std::vector<const Utterance*> ValidationOfStyle(const Corpus& corpus, int style);

std::string CvRowsToCsv(std::span<const CvRow> rows);

}  // namespace prosodiff

#endif  // PROSODIFF_EXPERIMENTS_H_
