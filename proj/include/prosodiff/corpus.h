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

#ifndef PROSODIFF_CORPUS_H_
#define PROSODIFF_CORPUS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prosodiff/tensor.h"

namespace prosodiff {

enum Channel : std::size_t { kLogPitch = 0, kEnergy = 1, kLogDuration = 2 };
inline constexpr std::array<const char*, 3> kChannelNames = {
    "log_pitch", "energy", "log_duration"};

// Phoneme-level prosody, stored as a [1, 3, L] tensor so it can be fed to
// the networks directly.
struct ProsodySequence {
  Tensor values;

  ProsodySequence() = default;
  explicit ProsodySequence(std::size_t length)
      : values({1, 3, length}) {}
  explicit ProsodySequence(Tensor t);

  std::size_t length() const { return values.dim(2); }
  double& at(std::size_t channel, std::size_t pos) {
    return values.at(0, channel, pos);
  }
  double at(std::size_t channel, std::size_t pos) const {
    return values.at(0, channel, pos);
  }
  std::vector<double> Channel(std::size_t channel) const;
};

struct StyleArchetype {
  int id = 0;
  double pitch_base = 0.0;
  double pitch_amplitude = 0.0;
  double pitch_frequency = 0.0;  // radians per phoneme
  double energy_mean = 0.0;
  double energy_spread = 0.0;
  double duration_log_mean = 0.0;
  double duration_log_spread = 0.0;
};

// Per-phoneme intrinsic effects shared by every style, plus the per-style
// preference over phoneme ids that leaks a weak style cue into the text.
struct PhonemeInventory {
  std::vector<double> pitch_offset;
  std::vector<double> energy_offset;
  std::vector<double> duration_offset;
  std::vector<std::vector<double>> style_logits;  // [styles][vocab]
};

struct CorpusConfig {
  int styles = 4;
  int utterances_per_style = 250;
  int min_length = 8;
  int max_length = 24;
  int vocab_size = 40;
  double validation_fraction = 0.2;
  // Spacing of the archetype pitch bases in log units.
  double pitch_base_gap = 0.2;
  // Every pair of archetypes must have some channel whose mean gap exceeds
  // this many within-style standard deviations.
  double separation_margin = 0.75;

  void Validate() const;

  bool operator==(const CorpusConfig&) const = default;
};

struct Utterance {
  std::string id;
  std::vector<int> phoneme_ids;
  ProsodySequence prosody;
  int style_id = 0;
};

struct NormalizationStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};
};

struct Corpus {
  CorpusConfig config;
  std::uint64_t seed = 0;
  std::vector<StyleArchetype> archetypes;
  PhonemeInventory inventory;
  std::vector<Utterance> utterances;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  NormalizationStats stats;

  std::vector<const Utterance*> Split(std::span<const std::size_t> indices) const;
};

// Deterministic in (config, seed). Throws if the archetypes fail the
// separation margin.
Corpus GenerateCorpus(const CorpusConfig& config, std::uint64_t seed);

// Per-style channel means and within-style standard deviations.
struct StyleMoments {
  std::vector<std::array<double, 3>> mean;
  std::vector<std::array<double, 3>> stddev;
};
StyleMoments ComputeStyleMoments(const Corpus& corpus);
// Smallest over style pairs of max_channel |mean gap| / larger stddev.
double ArchetypeSeparation(const StyleMoments& moments);

// Mean of frames[b_i, b_{i+1}) for each phoneme i.
std::vector<double> PhonemeAverage(std::span<const double> frames,
                                   std::span<const std::size_t> boundaries);

// Per-channel statistics over the given utterances. Throws on zero variance.
NormalizationStats ComputeNormalization(
    std::span<const Utterance* const> utterances);
ProsodySequence Normalize(const ProsodySequence& x, const NormalizationStats& s);
ProsodySequence Denormalize(const ProsodySequence& x,
                            const NormalizationStats& s);
// Tensor variants over [B, 3, L].
Tensor NormalizeTensor(const Tensor& x, const NormalizationStats& s);
Tensor DenormalizeTensor(const Tensor& x, const NormalizationStats& s);

// Directory layout: manifest.json plus utterances/<id>.csv with columns
// phoneme_id,log_pitch,energy,log_duration.
void SaveCorpus(const Corpus& corpus, const std::string& dir);
Corpus LoadCorpus(const std::string& dir);

std::string UtteranceToCsv(std::span<const int> phoneme_ids,
                           const ProsodySequence& prosody);
// Returns phoneme ids and prosody parsed from the CSV text.
std::pair<std::vector<int>, ProsodySequence> UtteranceFromCsv(
    const std::string& text);

}  // namespace prosodiff

#endif  // PROSODIFF_CORPUS_H_
