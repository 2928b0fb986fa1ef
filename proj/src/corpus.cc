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

#include "prosodiff/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "prosodiff/format.h"
#include "prosodiff/rng.h"

namespace prosodiff {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t U(int v) { return static_cast<std::size_t>(v); }

constexpr double kPitchCenter = 5.2;
constexpr double kMinAmplitude = 0.03;
constexpr double kMaxAmplitude = 0.3;
constexpr double kEnergyCenter = 2.0;
constexpr double kEnergyGap = 0.4;
constexpr double kDurationCenter = 2.0;
constexpr double kDurationGap = 0.2;
constexpr double kPitchNoise = 0.02;
constexpr double kPhonemePitchStd = 0.03;
constexpr double kPhonemeEnergyStd = 0.25;
constexpr double kPhonemeDurationStd = 0.2;
constexpr double kStyleLogitStd = 0.7;

std::vector<std::size_t> Permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng.engine());
  return p;
}

double Centered(std::size_t rank, int count) {
  return static_cast<double>(rank) - 0.5 * static_cast<double>(count - 1);
}

std::vector<StyleArchetype> MakeArchetypes(int count, double pitch_gap,
                                           Rng& rng) {
  const std::vector<std::size_t> amp_rank = Permutation(U(count), rng);
  const std::vector<std::size_t> energy_rank = Permutation(U(count), rng);
  const std::vector<std::size_t> duration_rank = Permutation(U(count), rng);
  std::vector<StyleArchetype> out;
  for (int k = 0; k < count; ++k) {
    StyleArchetype a;
    a.id = k;
    a.pitch_base = kPitchCenter + pitch_gap * Centered(U(k), count);
    a.pitch_amplitude =
        kMinAmplitude + (kMaxAmplitude - kMinAmplitude) *
                            static_cast<double>(amp_rank[U(k)]) /
                            static_cast<double>(count - 1);
    a.pitch_frequency = rng.Uniform(0.4, 0.9);
    a.energy_mean = kEnergyCenter + kEnergyGap * Centered(energy_rank[U(k)], count);
    a.energy_spread = rng.Uniform(0.1, 0.2);
    a.duration_log_mean =
        kDurationCenter + kDurationGap * Centered(duration_rank[U(k)], count);
    a.duration_log_spread = rng.Uniform(0.08, 0.15);
    out.push_back(a);
  }
  return out;
}

PhonemeInventory MakeInventory(int vocab, int styles, Rng& rng) {
  PhonemeInventory inv;
  for (int v = 0; v < vocab; ++v) {
    inv.pitch_offset.push_back(rng.Normal(0.0, kPhonemePitchStd));
    inv.energy_offset.push_back(rng.Normal(0.0, kPhonemeEnergyStd));
    inv.duration_offset.push_back(rng.Normal(0.0, kPhonemeDurationStd));
  }
  inv.style_logits.assign(U(styles), std::vector<double>(U(vocab)));
  for (auto& row : inv.style_logits) {
    for (double& l : row) l = rng.Normal(0.0, kStyleLogitStd);
  }
  return inv;
}

Utterance MakeUtterance(const CorpusConfig& config, const StyleArchetype& a,
                        const PhonemeInventory& inv, std::size_t index,
                        Rng& rng) {
  Utterance u;
  char id[32];
  std::snprintf(id, sizeof(id), "utt_%05zu", index);
  u.id = id;
  u.style_id = a.id;
  const std::size_t length =
      static_cast<std::size_t>(rng.UniformInt(config.min_length, config.max_length));
  std::vector<double> probs;
  for (double l : inv.style_logits[U(a.id)]) probs.push_back(std::exp(l));
  std::discrete_distribution<int> pick(probs.begin(), probs.end());
  const double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  u.prosody = ProsodySequence(length);
  for (std::size_t l = 0; l < length; ++l) {
    const int p = pick(rng.engine());
    u.phoneme_ids.push_back(p);
    const double pos = static_cast<double>(l);
    u.prosody.at(kLogPitch, l) =
        a.pitch_base +
        a.pitch_amplitude * std::sin(a.pitch_frequency * pos + phase) +
        inv.pitch_offset[U(p)] + rng.Normal(0.0, kPitchNoise);
    u.prosody.at(kEnergy, l) =
        a.energy_mean + inv.energy_offset[U(p)] + rng.Normal(0.0, a.energy_spread);
    u.prosody.at(kLogDuration, l) = a.duration_log_mean +
                                    inv.duration_offset[U(p)] +
                                    rng.Normal(0.0, a.duration_log_spread);
  }
  return u;
}

json ArchetypeToJson(const StyleArchetype& a) {
  return json{{"id", a.id},
              {"pitch_base", a.pitch_base},
              {"pitch_amplitude", a.pitch_amplitude},
              {"pitch_frequency", a.pitch_frequency},
              {"energy_mean", a.energy_mean},
              {"energy_spread", a.energy_spread},
              {"duration_log_mean", a.duration_log_mean},
              {"duration_log_spread", a.duration_log_spread}};
}

StyleArchetype ArchetypeFromJson(const json& j) {
  StyleArchetype a;
  a.id = j.at("id").get<int>();
  a.pitch_base = j.at("pitch_base").get<double>();
  a.pitch_amplitude = j.at("pitch_amplitude").get<double>();
  a.pitch_frequency = j.at("pitch_frequency").get<double>();
  a.energy_mean = j.at("energy_mean").get<double>();
  a.energy_spread = j.at("energy_spread").get<double>();
  a.duration_log_mean = j.at("duration_log_mean").get<double>();
  a.duration_log_spread = j.at("duration_log_spread").get<double>();
  return a;
}

json ConfigToJson(const CorpusConfig& c) {
  return json{{"styles", c.styles},
              {"utterances_per_style", c.utterances_per_style},
              {"min_length", c.min_length},
              {"max_length", c.max_length},
              {"vocab_size", c.vocab_size},
              {"validation_fraction", c.validation_fraction},
              {"pitch_base_gap", c.pitch_base_gap},
              {"separation_margin", c.separation_margin}};
}

CorpusConfig ConfigFromJson(const json& j) {
  CorpusConfig c;
  c.styles = j.at("styles").get<int>();
  c.utterances_per_style = j.at("utterances_per_style").get<int>();
  c.min_length = j.at("min_length").get<int>();
  c.max_length = j.at("max_length").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.pitch_base_gap = j.at("pitch_base_gap").get<double>();
  c.separation_margin = j.at("separation_margin").get<double>();
  return c;
}

}  // namespace

ProsodySequence::ProsodySequence(Tensor t) : values(std::move(t)) {
  if (values.rank() != 3 || values.dim(0) != 1 || values.dim(1) != 3) {
    throw std::invalid_argument("prosody must be [1, 3, L], got " +
                                ShapeToString(values.shape()));
  }
}

std::vector<double> ProsodySequence::Channel(std::size_t channel) const {
  if (channel >= 3) throw std::out_of_range("prosody channel out of range");
  std::vector<double> out(length());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = at(channel, l);
  return out;
}

void CorpusConfig::Validate() const {
  if (styles < 2) throw std::invalid_argument("corpus needs at least 2 styles");
  if (utterances_per_style < 1) {
    throw std::invalid_argument("utterances_per_style must be >= 1");
  }
  if (min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("need 1 <= min_length <= max_length");
  }
  if (vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation_fraction must lie in (0, 1)");
  }
  if (!(pitch_base_gap >= 0.0)) {
    throw std::invalid_argument("pitch_base_gap must be >= 0");
  }
  if (!(separation_margin >= 0.0)) {
    throw std::invalid_argument("separation_margin must be >= 0");
  }
}

std::vector<const Utterance*> Corpus::Split(
    std::span<const std::size_t> indices) const {
  std::vector<const Utterance*> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(&utterances.at(i));
  return out;
}

StyleMoments ComputeStyleMoments(const Corpus& corpus) {
  const std::size_t k = corpus.archetypes.size();
  std::vector<std::array<double, 3>> sum(k, {0, 0, 0});
  std::vector<std::array<double, 3>> sq(k, {0, 0, 0});
  std::vector<double> count(k, 0.0);
  for (const Utterance& u : corpus.utterances) {
    const std::size_t s = U(u.style_id);
    for (std::size_t l = 0; l < u.prosody.length(); ++l) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = u.prosody.at(c, l);
        sum[s][c] += v;
        sq[s][c] += v * v;
      }
      count[s] += 1.0;
    }
  }
  StyleMoments m;
  m.mean.resize(k);
  m.stddev.resize(k);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double mean = count[s] > 0 ? sum[s][c] / count[s] : 0.0;
      m.mean[s][c] = mean;
      m.stddev[s][c] =
          count[s] > 0 ? std::sqrt(std::max(0.0, sq[s][c] / count[s] - mean * mean))
                       : 0.0;
    }
  }
  return m;
}

double ArchetypeSeparation(const StyleMoments& m) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.mean.size(); ++i) {
    for (std::size_t j = i + 1; j < m.mean.size(); ++j) {
      double best = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double spread = std::max(m.stddev[i][c], m.stddev[j][c]);
        const double gap = std::abs(m.mean[i][c] - m.mean[j][c]);
        best = std::max(best, spread > 0 ? gap / spread
                                         : std::numeric_limits<double>::infinity());
      }
      worst = std::min(worst, best);
    }
  }
  return worst;
}

Corpus GenerateCorpus(const CorpusConfig& config, std::uint64_t seed) {
  config.Validate();
  Corpus corpus;
  corpus.config = config;
  corpus.seed = seed;
  Rng rng(seed, Stream::kCorpus);
  corpus.archetypes = MakeArchetypes(config.styles, config.pitch_base_gap, rng);
  corpus.inventory = MakeInventory(config.vocab_size, config.styles, rng);

  std::size_t index = 0;
  for (const StyleArchetype& a : corpus.archetypes) {
    std::vector<std::size_t> members;
    for (int i = 0; i < config.utterances_per_style; ++i) {
      members.push_back(index);
      corpus.utterances.push_back(
          MakeUtterance(config, a, corpus.inventory, index++, rng));
    }
    std::shuffle(members.begin(), members.end(), rng.engine());
    std::size_t held = 0;
    if (members.size() >= 2) {
      held = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::lround(
              config.validation_fraction * static_cast<double>(members.size()))),
          1, members.size() - 1);
    }
    corpus.validation.insert(corpus.validation.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(held));
    corpus.train.insert(corpus.train.end(),
                        members.begin() + static_cast<std::ptrdiff_t>(held),
                        members.end());
  }
  std::sort(corpus.train.begin(), corpus.train.end());
  std::sort(corpus.validation.begin(), corpus.validation.end());

  const double separation = ArchetypeSeparation(ComputeStyleMoments(corpus));
  if (separation < config.separation_margin) {
    throw std::runtime_error("style archetypes separated by only " +
                             FormatDouble(separation) + " < margin " +
                             FormatDouble(config.separation_margin));
  }
  const std::vector<const Utterance*> train = corpus.Split(corpus.train);
  corpus.stats = ComputeNormalization(train);
  return corpus;
}

std::vector<double> PhonemeAverage(std::span<const double> frames,
                                   std::span<const std::size_t> boundaries) {
  if (boundaries.size() < 2) {
    throw std::invalid_argument("phoneme boundaries need at least 2 entries");
  }
  if (boundaries.back() > frames.size()) {
    throw std::out_of_range("phoneme boundary past the last frame");
  }
  std::vector<double> out;
  out.reserve(boundaries.size() - 1);
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const std::size_t lo = boundaries[i];
    const std::size_t hi = boundaries[i + 1];
    if (hi <= lo) {
      throw std::invalid_argument("phoneme boundaries must be strictly increasing");
    }
    double sum = 0.0;
    for (std::size_t f = lo; f < hi; ++f) sum += frames[f];
    out.push_back(sum / static_cast<double>(hi - lo));
  }
  return out;
}

NormalizationStats ComputeNormalization(
    std::span<const Utterance* const> utterances) {
  std::array<double, 3> sum{0, 0, 0};
  std::array<double, 3> sq{0, 0, 0};
  double n = 0.0;
  for (const Utterance* u : utterances) {
    for (std::size_t l = 0; l < u->prosody.length(); ++l) {
      for (std::size_t c = 0; c < 3; ++c) {
        sum[c] += u->prosody.at(c, l);
        sq[c] += u->prosody.at(c, l) * u->prosody.at(c, l);
      }
      n += 1.0;
    }
  }
  if (n < 2.0) throw std::invalid_argument("normalization needs >= 2 phonemes");
  NormalizationStats s;
  for (std::size_t c = 0; c < 3; ++c) {
    s.mean[c] = sum[c] / n;
    const double var = sq[c] / n - s.mean[c] * s.mean[c];
    if (!(var > 0.0)) {
      throw std::invalid_argument(std::string("channel ") + kChannelNames[c] +
                                  " has zero variance");
    }
    s.stddev[c] = std::sqrt(var);
  }
  return s;
}

Tensor NormalizeTensor(const Tensor& x, const NormalizationStats& s) {
  if (x.rank() != 3 || x.dim(1) != 3) {
    throw std::invalid_argument("normalize expects [B, 3, L]");
  }
  Tensor out(x.shape());
  for (std::size_t b = 0; b < x.dim(0); ++b) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t l = 0; l < x.dim(2); ++l) {
        out.at(b, c, l) = (x.at(b, c, l) - s.mean[c]) / s.stddev[c];
      }
    }
  }
  return out;
}

Tensor DenormalizeTensor(const Tensor& x, const NormalizationStats& s) {
  if (x.rank() != 3 || x.dim(1) != 3) {
    throw std::invalid_argument("denormalize expects [B, 3, L]");
  }
  Tensor out(x.shape());
  for (std::size_t b = 0; b < x.dim(0); ++b) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t l = 0; l < x.dim(2); ++l) {
        out.at(b, c, l) = x.at(b, c, l) * s.stddev[c] + s.mean[c];
      }
    }
  }
  return out;
}

ProsodySequence Normalize(const ProsodySequence& x, const NormalizationStats& s) {
  return ProsodySequence(NormalizeTensor(x.values, s));
}

ProsodySequence Denormalize(const ProsodySequence& x,
                            const NormalizationStats& s) {
  return ProsodySequence(DenormalizeTensor(x.values, s));
}

std::string UtteranceToCsv(std::span<const int> phoneme_ids,
                           const ProsodySequence& prosody) {
  if (phoneme_ids.size() != prosody.length()) {
    throw std::invalid_argument("phoneme ids and prosody lengths differ");
  }
  std::string out = "phoneme_id,log_pitch,energy,log_duration\n";
  for (std::size_t l = 0; l < prosody.length(); ++l) {
    out += std::to_string(phoneme_ids[l]);
    for (std::size_t c = 0; c < 3; ++c) {
      out += ',';
      out += FormatDouble(prosody.at(c, l));
    }
    out += '\n';
  }
  return out;
}

std::pair<std::vector<int>, ProsodySequence> UtteranceFromCsv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty utterance csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "phoneme_id,log_pitch,energy,log_duration") {
    throw std::runtime_error("unexpected utterance csv header: " + line);
  }
  std::vector<int> ids;
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 4) {
      throw std::runtime_error("utterance csv row needs 4 fields: " + line);
    }
    const double id = ParseDouble(f[0]);
    if (id < 0 || id != std::floor(id)) {
      throw std::runtime_error("bad phoneme id: " + f[0]);
    }
    ids.push_back(static_cast<int>(id));
    rows.push_back({ParseDouble(f[1]), ParseDouble(f[2]), ParseDouble(f[3])});
  }
  if (rows.empty()) throw std::runtime_error("utterance csv has no rows");
  ProsodySequence p(rows.size());
  for (std::size_t l = 0; l < rows.size(); ++l) {
    for (std::size_t c = 0; c < 3; ++c) p.at(c, l) = rows[l][c];
  }
  return {std::move(ids), std::move(p)};
}

void SaveCorpus(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "utterances");
  json manifest;
  manifest["format"] = "prosodiff-corpus";
  manifest["version"] = 1;
  manifest["seed"] = corpus.seed;
  manifest["config"] = ConfigToJson(corpus.config);
  json archetypes = json::array();
  for (const StyleArchetype& a : corpus.archetypes) {
    archetypes.push_back(ArchetypeToJson(a));
  }
  manifest["archetypes"] = archetypes;
  manifest["inventory"] = {{"pitch_offset", corpus.inventory.pitch_offset},
                           {"energy_offset", corpus.inventory.energy_offset},
                           {"duration_offset", corpus.inventory.duration_offset},
                           {"style_logits", corpus.inventory.style_logits}};
  manifest["normalization"] = {{"mean", corpus.stats.mean},
                               {"stddev", corpus.stats.stddev}};
  std::vector<std::string> split(corpus.utterances.size(), "train");
  for (std::size_t i : corpus.validation) split[i] = "validation";
  json utts = json::array();
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const Utterance& u = corpus.utterances[i];
    utts.push_back({{"id", u.id},
                    {"style_id", u.style_id},
                    {"split", split[i]},
                    {"length", u.prosody.length()}});
    WriteFile((fs::path(dir) / "utterances" / (u.id + ".csv")).string(),
              UtteranceToCsv(u.phoneme_ids, u.prosody));
  }
  manifest["utterances"] = utts;
  WriteFile((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

Corpus LoadCorpus(const std::string& dir) {
  json manifest;
  try {
    manifest = json::parse(ReadFile((fs::path(dir) / "manifest.json").string()));
  } catch (const json::exception& e) {
    throw std::runtime_error("corpus manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "prosodiff-corpus") {
    throw std::runtime_error("not a prosodiff corpus: " + dir);
  }
  Corpus corpus;
  try {
    corpus.seed = manifest.at("seed").get<std::uint64_t>();
    corpus.config = ConfigFromJson(manifest.at("config"));
    for (const json& a : manifest.at("archetypes")) {
      corpus.archetypes.push_back(ArchetypeFromJson(a));
    }
    const json& inv = manifest.at("inventory");
    corpus.inventory.pitch_offset = inv.at("pitch_offset").get<std::vector<double>>();
    corpus.inventory.energy_offset = inv.at("energy_offset").get<std::vector<double>>();
    corpus.inventory.duration_offset =
        inv.at("duration_offset").get<std::vector<double>>();
    corpus.inventory.style_logits =
        inv.at("style_logits").get<std::vector<std::vector<double>>>();
    corpus.stats.mean = manifest.at("normalization").at("mean").get<std::array<double, 3>>();
    corpus.stats.stddev =
        manifest.at("normalization").at("stddev").get<std::array<double, 3>>();
    for (const json& entry : manifest.at("utterances")) {
      Utterance u;
      u.id = entry.at("id").get<std::string>();
      u.style_id = entry.at("style_id").get<int>();
      auto [ids, prosody] = UtteranceFromCsv(
          ReadFile((fs::path(dir) / "utterances" / (u.id + ".csv")).string()));
      u.phoneme_ids = std::move(ids);
      u.prosody = std::move(prosody);
      for (int id : u.phoneme_ids) {
        if (id >= corpus.config.vocab_size) {
          throw std::runtime_error("phoneme id outside vocabulary in " + u.id);
        }
      }
      const std::size_t index = corpus.utterances.size();
      const std::string split = entry.at("split").get<std::string>();
      if (split == "train") {
        corpus.train.push_back(index);
      } else if (split == "validation") {
        corpus.validation.push_back(index);
      } else {
        throw std::runtime_error("unknown split '" + split + "' for " + u.id);
      }
      corpus.utterances.push_back(std::move(u));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("corpus manifest: " + std::string(e.what()));
  }
  return corpus;
}

}  // namespace prosodiff
