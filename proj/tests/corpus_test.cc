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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "prosodiff/checkpoint.h"
#include "prosodiff/corpus.h"
#include "prosodiff/format.h"
#include "test_util.h"

namespace prosodiff {
namespace {

namespace fs = std::filesystem;

CorpusConfig SmallConfig() {
  CorpusConfig c;
  c.utterances_per_style = 30;
  return c;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("prosodiff_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string ReadAll(const fs::path& dir) {
  std::string all;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) all += f.filename().string() + ReadFile(f.string());
  return all;
}

TEST(CorpusConfig, Validation) {
  EXPECT_NO_THROW(CorpusConfig{}.Validate());
  CorpusConfig c;
  c.min_length = 30;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = CorpusConfig{};
  c.styles = 1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = CorpusConfig{};
  c.validation_fraction = 1.0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(Corpus, SameSeedSameCorpus) {
  const Corpus a = GenerateCorpus(SmallConfig(), 5);
  const Corpus b = GenerateCorpus(SmallConfig(), 5);
  ASSERT_EQ(a.utterances.size(), b.utterances.size());
  for (std::size_t i = 0; i < a.utterances.size(); ++i) {
    EXPECT_EQ(a.utterances[i].id, b.utterances[i].id);
    EXPECT_EQ(a.utterances[i].phoneme_ids, b.utterances[i].phoneme_ids);
    EXPECT_EQ(a.utterances[i].style_id, b.utterances[i].style_id);
    const auto va = a.utterances[i].prosody.values.values();
    const auto vb = b.utterances[i].prosody.values.values();
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  }
  EXPECT_EQ(a.train, b.train);
  const Corpus c = GenerateCorpus(SmallConfig(), 6);
  EXPECT_NE(a.utterances[0].phoneme_ids, c.utterances[0].phoneme_ids);
}

TEST(Corpus, FixedLength) {
  CorpusConfig config = SmallConfig();
  config.min_length = 4;
  config.max_length = 4;
  for (const Utterance& u : GenerateCorpus(config, 1).utterances) {
    EXPECT_EQ(u.prosody.length(), 4u);
    EXPECT_EQ(u.phoneme_ids.size(), 4u);
  }
}

TEST(Corpus, LengthsAndIdsInRange) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), 2);
  EXPECT_EQ(corpus.utterances.size(), 120u);
  for (const Utterance& u : corpus.utterances) {
    EXPECT_GE(u.prosody.length(), 8u);
    EXPECT_LE(u.prosody.length(), 24u);
    for (int id : u.phoneme_ids) {
      EXPECT_GE(id, 0);
      EXPECT_LT(id, 40);
    }
    for (double v : u.prosody.Channel(kEnergy)) EXPECT_GT(v, 0.0);
  }
}

TEST(Corpus, PitchBasesSeparatedByGap) {
  CorpusConfig config;
  config.styles = 2;
  config.utterances_per_style = 500;
  config.pitch_base_gap = 1.0;
  const Corpus corpus = GenerateCorpus(config, 3);
  EXPECT_NEAR(corpus.archetypes[1].pitch_base - corpus.archetypes[0].pitch_base, 1.0, 1e-12);
  const StyleMoments m = ComputeStyleMoments(corpus);
  EXPECT_NEAR(m.mean[1][kLogPitch] - m.mean[0][kLogPitch], 1.0, 0.05);
}

TEST(Corpus, SplitDisjointStratifiedAndStable) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), 4);
  std::set<std::size_t> train(corpus.train.begin(), corpus.train.end());
  std::set<std::size_t> val(corpus.validation.begin(), corpus.validation.end());
  EXPECT_EQ(train.size() + val.size(), corpus.utterances.size());
  for (std::size_t i : val) EXPECT_FALSE(train.count(i));
  std::vector<int> per_style(4, 0);
  for (std::size_t i : val) ++per_style[corpus.utterances[i].style_id];
  for (int n : per_style) EXPECT_EQ(n, 6);
  EXPECT_EQ(GenerateCorpus(SmallConfig(), 4).validation, corpus.validation);
}

TEST(Corpus, ArchetypesMeetSeparationMargin) {
  const Corpus corpus = GenerateCorpus(CorpusConfig{}, 7);
  EXPECT_GE(ArchetypeSeparation(ComputeStyleMoments(corpus)), CorpusConfig{}.separation_margin);
  CorpusConfig impossible = SmallConfig();
  impossible.separation_margin = 100.0;
  EXPECT_THROW(GenerateCorpus(impossible, 7), std::runtime_error);
}

TEST(PhonemeAverage, Examples) {
  const std::vector<double> frames = {1, 2, 3, 4};
  const std::vector<std::size_t> bounds = {0, 2, 4};
  EXPECT_EQ(PhonemeAverage(frames, bounds), (std::vector<double>{1.5, 3.5}));
  const std::vector<double> flat(7, 2.5);
  const std::vector<std::size_t> b2 = {0, 3, 4, 7};
  for (double v : PhonemeAverage(flat, b2)) EXPECT_EQ(v, 2.5);
  EXPECT_THROW(PhonemeAverage(frames, std::vector<std::size_t>{0, 3, 2}), std::invalid_argument);
  EXPECT_THROW(PhonemeAverage(frames, std::vector<std::size_t>{0, 5}), std::out_of_range);
}

TEST(PhonemeAverage, MatchesLoopOracle) {
  Rng rng(8);
  std::vector<double> frames(40);
  for (double& f : frames) f = rng.Normal();
  std::vector<std::size_t> bounds = {0};
  while (bounds.back() < frames.size()) {
    bounds.push_back(std::min(frames.size(), bounds.back() + 1 +
                                                 static_cast<std::size_t>(rng.UniformInt(0, 4))));
  }
  const std::vector<double> avg = PhonemeAverage(frames, bounds);
  ASSERT_EQ(avg.size(), bounds.size() - 1);
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    double sum = 0.0;
    for (std::size_t f = bounds[i]; f < bounds[i + 1]; ++f) sum += frames[f];
    EXPECT_NEAR(avg[i], sum / static_cast<double>(bounds[i + 1] - bounds[i]), 1e-12);
  }
}

TEST(Normalization, RoundTrip) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), 9);
  const NormalizationStats& s = corpus.stats;
  for (std::size_t c = 0; c < 3; ++c) EXPECT_GT(s.stddev[c], 0.0);
  const ProsodySequence& x = corpus.utterances[3].prosody;
  const ProsodySequence back = Denormalize(Normalize(x, s), s);
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    EXPECT_NEAR(back.values[i], x.values[i], 1e-12);
  }
  const auto train = corpus.Split(corpus.train);
  double sum = 0.0, n = 0.0;
  for (const Utterance* u : train) {
    for (double v : Normalize(u->prosody, s).Channel(kLogPitch)) {
      sum += v;
      n += 1.0;
    }
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-9);
  std::vector<Utterance> flat(2);
  flat[0].prosody = ProsodySequence(Tensor({1, 3, 2}, 1.0));
  flat[1].prosody = flat[0].prosody;
  const std::vector<const Utterance*> ptrs = {&flat[0], &flat[1]};
  EXPECT_THROW(ComputeNormalization(ptrs), std::invalid_argument);
}

TEST(Normalization, StatisticsSurviveCheckpointRoundTrip) {
  const Corpus corpus = GenerateCorpus(SmallConfig(), 10);
  const NormalizationStats& s = corpus.stats;
  std::vector<NamedTensor> entries = {
      {"norm/mean", Tensor({3}, {s.mean[0], s.mean[1], s.mean[2]})},
      {"norm/stddev", Tensor({3}, {s.stddev[0], s.stddev[1], s.stddev[2]})}};
  const auto loaded = DecodeCheckpoint(EncodeCheckpoint(entries));
  NormalizationStats r;
  for (std::size_t c = 0; c < 3; ++c) {
    r.mean[c] = FindEntry(loaded, "norm/mean").tensor[c];
    r.stddev[c] = FindEntry(loaded, "norm/stddev").tensor[c];
  }
  const ProsodySequence& x = corpus.utterances[0].prosody;
  const ProsodySequence a = Normalize(x, s), b = Normalize(x, r);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(a.values[i], b.values[i]);
}

TEST(CorpusIo, SaveLoadRoundTripAndDeterministicBytes) {
  const fs::path a = TempDir("corpus_a"), b = TempDir("corpus_b");
  const Corpus corpus = GenerateCorpus(SmallConfig(), 11);
  SaveCorpus(corpus, a.string());
  SaveCorpus(GenerateCorpus(SmallConfig(), 11), b.string());
  EXPECT_EQ(ReadAll(a), ReadAll(b));
  const Corpus loaded = LoadCorpus(a.string());
  EXPECT_EQ(loaded.config, corpus.config);
  EXPECT_EQ(loaded.seed, corpus.seed);
  EXPECT_EQ(loaded.train, corpus.train);
  EXPECT_EQ(loaded.validation, corpus.validation);
  EXPECT_EQ(loaded.stats.mean, corpus.stats.mean);
  EXPECT_EQ(loaded.stats.stddev, corpus.stats.stddev);
  ASSERT_EQ(loaded.utterances.size(), corpus.utterances.size());
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const auto x = corpus.utterances[i].prosody.values.values();
    const auto y = loaded.utterances[i].prosody.values.values();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
    EXPECT_EQ(loaded.utterances[i].phoneme_ids, corpus.utterances[i].phoneme_ids);
  }
  EXPECT_EQ(loaded.archetypes.size(), corpus.archetypes.size());
  EXPECT_EQ(loaded.archetypes[2].pitch_amplitude, corpus.archetypes[2].pitch_amplitude);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(CorpusIo, DefaultScaleWritesOneFilePerUtterance) {
  const fs::path dir = TempDir("corpus_full");
  SaveCorpus(GenerateCorpus(CorpusConfig{}, 12), dir.string());
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "utterances")) files += e.is_regular_file();
  EXPECT_EQ(files, 1000u);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

TEST(CorpusIo, UtteranceCsv) {
  ProsodySequence x(2);
  x.at(0, 0) = 5.1;
  x.at(1, 0) = 2.25;
  x.at(2, 0) = 2.0;
  x.at(0, 1) = 5.3;
  x.at(1, 1) = 1.0 / 3.0;
  x.at(2, 1) = -0.5;
  const std::vector<int> ids = {4, 17};
  const std::string csv = UtteranceToCsv(ids, x);
  EXPECT_EQ(csv.rfind("phoneme_id,log_pitch,energy,log_duration\n", 0), 0u);
  const auto [ids2, y] = UtteranceFromCsv(csv);
  EXPECT_EQ(ids2, ids);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(y.values[i], x.values[i]);
  EXPECT_THROW(UtteranceFromCsv("phoneme_id,log_pitch,energy,log_duration\n1,2,3\n"),
               std::runtime_error);
  EXPECT_THROW(LoadCorpus("/nonexistent/corpus"), std::runtime_error);
}

}  // namespace
}  // namespace prosodiff
