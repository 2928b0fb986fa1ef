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

#include "prosodiff/experiments.h"

#include <algorithm>
#include <stdexcept>

#include "prosodiff/format.h"
#include "prosodiff/rng.h"

namespace prosodiff {
namespace {

const char* PathName(SamplingPath path) {
  switch (path) {
    case SamplingPath::kConditional:
      return "conditional";
    case SamplingPath::kUnconditional:
      return "unconditional";
    case SamplingPath::kZeroText:
      return "zero_text";
  }
  return "unknown";
}

std::array<double, 3> MeanCv(std::span<const ProsodySequence> samples) {
  std::array<double, 3> out{};
  for (const ProsodySequence& s : samples) {
    for (std::size_t c = 0; c < 3; ++c) {
      out[c] += CoefficientOfVariation(LinearChannel(s, c));
    }
  }
  for (double& v : out) v /= static_cast<double>(samples.size());
  return out;
}

void RequireNonEmpty(std::span<const Utterance* const> utterances,
                     const char* what) {
  if (utterances.empty()) {
    throw std::invalid_argument(std::string(what) + ": no utterances");
  }
}

}  // namespace

std::vector<ProsodySequence> GenerateForUtterances(
    const ProsodyModel& model, std::span<const Utterance* const> utterances,
    SamplingPath path, const GuidanceParams& params, std::uint64_t seed) {
  std::vector<ProsodySequence> out;
  out.reserve(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Utterance& u = *utterances[i];
    GenerationRequest request;
    request.phoneme_ids = u.phoneme_ids;
    request.guidance = params;
    request.seed = seed;
    request.index = i;
    if (path != SamplingPath::kUnconditional) {
      request.style = model.EncodeReference(u.prosody).first;
    }
    request.zero_text = path == SamplingPath::kZeroText;
    out.push_back(Generate(model, request));
  }
  return out;
}

std::vector<DivergenceRow> EvaluateDivergence(
    const ProsodyModel& model, std::span<const Utterance* const> utterances,
    std::span<const SamplingPath> paths, const GuidanceParams& params,
    std::uint64_t seed) {
  RequireNonEmpty(utterances, "divergence");
  std::vector<ProsodySequence> reference;
  std::vector<int> groups;
  for (const Utterance* u : utterances) {
    reference.push_back(u->prosody);
    groups.push_back(u->style_id);
  }
  std::vector<DivergenceRow> rows;
  for (SamplingPath path : paths) {
    const std::vector<ProsodySequence> generated =
        GenerateForUtterances(model, utterances, path, params, seed);
    DivergenceRow row;
    row.path = PathName(path);
    row.grouped = GroupedJs(generated, groups, reference, groups);
    row.pooled = PooledJs(generated, reference);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CvRow> CvSweep(const ProsodyModel& model,
                           std::span<const Utterance* const> utterances,
                           std::span<const double> etas,
                           const GuidanceParams& base, int samples,
                           std::uint64_t seed) {
  RequireNonEmpty(utterances, "cv sweep");
  if (etas.empty()) throw std::invalid_argument("cv sweep: empty eta list");
  if (samples < 1) throw std::invalid_argument("cv sweep: samples must be >= 1");
  std::vector<StyleCondition> styles;
  for (const Utterance* u : utterances) {
    styles.push_back(model.EncodeReference(u->prosody).first);
  }
  std::vector<CvRow> rows;
  for (double eta : etas) {
    std::vector<ProsodySequence> generated;
    for (int s = 0; s < samples; ++s) {
      const std::size_t k = static_cast<std::size_t>(s) % utterances.size();
      GenerationRequest request;
      request.phoneme_ids = utterances[k]->phoneme_ids;
      request.style = styles[k];
      request.guidance = base;
      request.guidance.eta = eta;
      request.seed = seed;
      request.index = static_cast<std::uint64_t>(s);
      generated.push_back(Generate(model, request));
    }
    rows.push_back({eta, MeanCv(generated)});
  }
  return rows;
}

std::vector<CvRow> TransferSweep(const ProsodyModel& model,
                                 const Utterance& reference,
                                 std::span<const Utterance* const> texts,
                                 std::span<const double> etas,
                                 const GuidanceParams& base, int samples,
                                 std::uint64_t seed) {
  RequireNonEmpty(texts, "transfer");
  if (etas.empty()) throw std::invalid_argument("transfer: empty eta list");
  if (samples < 1) throw std::invalid_argument("transfer: samples must be >= 1");
  const StyleCondition style = model.EncodeReference(reference.prosody).first;
  std::vector<CvRow> rows;
  for (double eta : etas) {
    std::vector<ProsodySequence> generated;
    for (int s = 0; s < samples; ++s) {
      GenerationRequest request;
      request.phoneme_ids =
          texts[static_cast<std::size_t>(s) % texts.size()]->phoneme_ids;
      request.style = style;
      request.guidance = base;
      request.guidance.eta = eta;
      request.seed = seed;
      request.index = static_cast<std::uint64_t>(s);
      generated.push_back(Generate(model, request));
    }
    rows.push_back({eta, MeanCv(generated)});
  }
  return rows;
}

TokenControlResult EvaluateTokenControl(
    const ProsodyModel& model, std::span<const Utterance* const> texts,
    int samples_per_token, const GuidanceParams& params, int baseline_repeats,
    std::uint64_t seed) {
  RequireNonEmpty(texts, "token control");
  if (samples_per_token < 2) {
    throw std::invalid_argument("token control needs >= 2 samples per token");
  }
  const int tokens = model.config().style.token_count;
  TokenControlResult result;
  for (int k = 0; k < tokens; ++k) {
    const StyleCondition style =
        model.bank().ConditionFromWeights(TokenWeights::OneHot(tokens, k));
    for (int s = 0; s < samples_per_token; ++s) {
      GenerationRequest request;
      request.phoneme_ids =
          texts[static_cast<std::size_t>(s) % texts.size()]->phoneme_ids;
      request.style = style;
      request.guidance = params;
      request.seed = seed;
      request.index = static_cast<std::uint64_t>(k * samples_per_token + s);
      result.descriptors.push_back(Descriptor(Generate(model, request)));
      result.labels.push_back(k);
    }
  }
  result.accuracy = ClusterSeparation(result.descriptors, result.labels);
  Rng rng(seed, Stream::kEvaluation);
  std::vector<int> shuffled = result.labels;
  double sum = 0.0;
  for (int r = 0; r < baseline_repeats; ++r) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    sum += ClusterSeparation(result.descriptors, shuffled);
  }
  result.random_baseline = baseline_repeats > 0 ? sum / baseline_repeats : 0.0;
  return result;
}

int HighVariationStyle(const Corpus& corpus) {
  const auto it = std::max_element(
      corpus.archetypes.begin(), corpus.archetypes.end(),
      [](const StyleArchetype& a, const StyleArchetype& b) {
        return a.pitch_amplitude < b.pitch_amplitude;
      });
  if (it == corpus.archetypes.end()) throw std::invalid_argument("no archetypes");
  return it->id;
}

int LowVariationStyle(const Corpus& corpus) {
  const auto it = std::min_element(
      corpus.archetypes.begin(), corpus.archetypes.end(),
      [](const StyleArchetype& a, const StyleArchetype& b) {
        return a.pitch_amplitude < b.pitch_amplitude;
      });
  if (it == corpus.archetypes.end()) throw std::invalid_argument("no archetypes");
  return it->id;
}

std::vector<const Utterance*> ValidationOfStyle(const Corpus& corpus, int style) {
  std::vector<const Utterance*> out;
  for (std::size_t i : corpus.validation) {
    if (corpus.utterances[i].style_id == style) out.push_back(&corpus.utterances[i]);
  }
  return out;
}

std::string CvRowsToCsv(std::span<const CvRow> rows) {
  std::string out = "eta,cv_pitch,cv_energy,cv_duration\n";
  for (const CvRow& r : rows) {
    out += FormatDouble(r.eta) + "," + FormatDouble(r.cv[0]) + "," +
           FormatDouble(r.cv[1]) + "," + FormatDouble(r.cv[2]) + "\n";
  }
  return out;
}

}  // namespace prosodiff
