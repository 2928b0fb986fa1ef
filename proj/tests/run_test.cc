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
#include <stdexcept>

#include "prosodiff/config.h"
#include "prosodiff/eval.h"
#include "prosodiff/experiments.h"
#include "prosodiff/format.h"
#include "prosodiff/model.h"
#include "prosodiff/svg.h"
#include "prosodiff/trainer.h"

namespace prosodiff {
namespace {

namespace fs = std::filesystem;

RunConfig TinyRun() {
  RunConfig c;
  c.seed = 3;
  c.corpus.utterances_per_style = 12;
  c.corpus.max_length = 10;
  c.denoiser.residual_layers = 2;
  c.denoiser.hidden_channels = 8;
  c.denoiser.time_embedding_dim = 8;
  c.denoiser.condition_dim = 8;
  c.style.token_dim = 8;
  c.style.heads = 2;
  c.style.reference_channels = 4;
  c.diffusion_steps = 10;
  c.train.steps = 6;
  c.train.batch_size = 4;
  c.train.checkpoint_every = 3;
  return c;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("prosodiff_run_" + name);
  fs::remove_all(dir);
  return dir;
}

bool SameTensor(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

void ExpectSameParameters(const ParameterSet& a, const ParameterSet& b) {
  ASSERT_EQ(a.Names(), b.Names());
  for (const std::string& name : a.Names()) {
    EXPECT_TRUE(SameTensor(a.Get(name).tensor(), b.Get(name).tensor())) << name;
    EXPECT_EQ(a.Get(name).first_moment, b.Get(name).first_moment) << name;
    EXPECT_EQ(a.Get(name).second_moment, b.Get(name).second_moment) << name;
  }
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c = TinyRun();
  c.guidance = {3.5, 0.25, 2.0};
  c.eval.eta_sweep = {0.5, 9.0};
  c.train.adam.learning_rate = 1.0 / 3.0;
  c.denoiser.use_text = false;
  c.output_dir = "somewhere/else";
  EXPECT_EQ(ParseRunConfig(RunConfigToJson(c)), c);
  EXPECT_EQ(ParseRunConfig(RunConfigToJson(RunConfig{})), RunConfig{});
  EXPECT_EQ(RunConfigToJson(c), RunConfigToJson(ParseRunConfig(RunConfigToJson(c))));
}

TEST(RunConfig, DefaultsAndErrors) {
  const RunConfig d;
  EXPECT_EQ(d.corpus.styles, 4);
  EXPECT_EQ(d.corpus.utterances_per_style, 250);
  EXPECT_EQ(d.diffusion_steps, 200);
  EXPECT_EQ(d.denoiser.residual_layers, 12);
  EXPECT_EQ(d.style.token_count, 4);
  EXPECT_EQ(ParseRunConfig("{\"seed\": 11}").seed, 11u);
  EXPECT_THROW(ParseRunConfig("{\"sed\": 11}"), std::invalid_argument);
  EXPECT_THROW(ParseRunConfig("{\"train\": {\"stepz\": 1}}"), std::invalid_argument);
  EXPECT_THROW(ParseRunConfig("{\"train\": {\"steps\": \"many\"}}"), std::invalid_argument);
  EXPECT_THROW(ParseRunConfig("{\"eval\": {\"eta_sweep\": []}}"), std::invalid_argument);
  EXPECT_THROW(ParseRunConfig("{\"style\": {\"token_dim\": 32}}"), std::invalid_argument);
  EXPECT_THROW(ParseRunConfig("not json"), std::invalid_argument);
}

class TrainedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new RunConfig(TinyRun());
    corpus_ = new Corpus(GenerateCorpus(config_->corpus, config_->seed));
    model_ = new ProsodyModel(*config_, corpus_->stats);
    dir_ = new fs::path(TempDir("trained"));
    TrainOptions options;
    options.output_dir = dir_->string();
    rows_ = new std::vector<LossRow>(Train(*model_, *corpus_, options));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete rows_;
    delete dir_;
    delete model_;
    delete corpus_;
    delete config_;
  }

  static RunConfig* config_;
  static Corpus* corpus_;
  static ProsodyModel* model_;
  static fs::path* dir_;
  static std::vector<LossRow>* rows_;
};

RunConfig* TrainedRun::config_ = nullptr;
Corpus* TrainedRun::corpus_ = nullptr;
ProsodyModel* TrainedRun::model_ = nullptr;
fs::path* TrainedRun::dir_ = nullptr;
std::vector<LossRow>* TrainedRun::rows_ = nullptr;

TEST_F(TrainedRun, WritesLossLogAndCheckpoints) {
  ASSERT_EQ(rows_->size(), 6u);
  for (std::size_t i = 0; i < rows_->size(); ++i) EXPECT_EQ((*rows_)[i].step, static_cast<int>(i) + 1);
  EXPECT_EQ(model_->step(), 6);
  const auto logged = LossRowsFromCsv(ReadFile((*dir_ / "loss.csv").string()));
  ASSERT_EQ(logged.size(), 6u);
  for (std::size_t i = 0; i < logged.size(); ++i) {
    EXPECT_EQ(logged[i].step, (*rows_)[i].step);
    EXPECT_EQ(logged[i].loss_c, (*rows_)[i].loss_c);
  }
  EXPECT_TRUE(fs::exists(*dir_ / "checkpoints" / "step_000003.bin"));
  EXPECT_TRUE(fs::exists(*dir_ / "checkpoints" / "step_000006.bin"));
  EXPECT_TRUE(fs::exists(*dir_ / "model.bin"));
}

TEST_F(TrainedRun, CheckpointRoundTrip) {
  const ProsodyModel loaded = ProsodyModel::Load((*dir_ / "model.bin").string(), *config_);
  EXPECT_EQ(loaded.step(), 6);
  ExpectSameParameters(loaded.conditional().parameters(), model_->conditional().parameters());
  ExpectSameParameters(loaded.unconditional().parameters(), model_->unconditional().parameters());
  ExpectSameParameters(loaded.bank().parameters(), model_->bank().parameters());
  EXPECT_EQ(loaded.stats().mean, model_->stats().mean);
  EXPECT_TRUE(SameTensor(loaded.text().table(), model_->text().table()));
  RunConfig other = *config_;
  other.denoiser.hidden_channels = 6;
  EXPECT_THROW(ProsodyModel::Load((*dir_ / "model.bin").string(), other), std::runtime_error);
  other = *config_;
  other.diffusion_steps = 20;
  EXPECT_THROW(ProsodyModel::Load((*dir_ / "model.bin").string(), other), std::runtime_error);
}

TEST_F(TrainedRun, ResumeMatchesUninterruptedRun) {
  const fs::path resumed_dir = TempDir("resumed");
  ProsodyModel resumed =
      ProsodyModel::Load((*dir_ / "checkpoints" / "step_000003.bin").string(), *config_);
  EXPECT_EQ(resumed.step(), 3);
  fs::create_directories(resumed_dir);
  fs::copy_file(*dir_ / "loss.csv", resumed_dir / "loss.csv");
  TrainOptions options;
  options.output_dir = resumed_dir.string();
  const std::vector<LossRow> rows = Train(resumed, *corpus_, options);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows.front().step, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].loss_c, (*rows_)[i + 3].loss_c);
    EXPECT_EQ(rows[i].loss_nc, (*rows_)[i + 3].loss_nc);
  }
  ExpectSameParameters(resumed.conditional().parameters(), model_->conditional().parameters());
  EXPECT_EQ(ReadFile((resumed_dir / "model.bin").string()), ReadFile((*dir_ / "model.bin").string()));
  EXPECT_EQ(ReadFile((resumed_dir / "loss.csv").string()), ReadFile((*dir_ / "loss.csv").string()));
  fs::remove_all(resumed_dir);
}

TEST_F(TrainedRun, CorpusMismatchIsRejected) {
  RunConfig other = *config_;
  other.corpus.utterances_per_style = 13;
  EXPECT_THROW(RequireMatchingCorpus(other, *corpus_), std::invalid_argument);
  ProsodyModel fresh(other, corpus_->stats);
  EXPECT_THROW(Train(fresh, *corpus_), std::invalid_argument);
}

TEST_F(TrainedRun, GenerationIsSeededAndScalable) {
  const Utterance& u = *corpus_->Split(corpus_->validation).front();
  GenerationRequest r;
  r.phoneme_ids = u.phoneme_ids;
  r.style = model_->bank().ConditionFromWeights(TokenWeights::OneHot(4, 1));
  r.guidance = {3.0, 0.7, 1.0};
  r.seed = 9;
  r.index = 2;
  const ProsodySequence a = Generate(*model_, r);
  EXPECT_TRUE(SameTensor(a.values, Generate(*model_, r).values));
  EXPECT_EQ(a.length(), u.phoneme_ids.size());

  r.scale = {2.0, 1.0, 1.0};
  const ProsodySequence doubled = Generate(*model_, r);
  for (std::size_t l = 0; l < a.length(); ++l) {
    EXPECT_NEAR(std::exp(doubled.at(kLogPitch, l)), 2.0 * std::exp(a.at(kLogPitch, l)),
                1e-12 * std::exp(a.at(kLogPitch, l)));
    EXPECT_EQ(doubled.at(kEnergy, l), a.at(kEnergy, l));
    EXPECT_EQ(doubled.at(kLogDuration, l), a.at(kLogDuration, l));
  }
  r.index = 3;
  EXPECT_FALSE(SameTensor(Generate(*model_, r).values, doubled.values));
}

TEST(ApplyScaling, Contract) {
  ProsodySequence x(3);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t l = 0; l < 3; ++l) x.at(c, l) = 0.5 + static_cast<double>(c + l);
  }
  const ProsodySequence same = ApplyScaling(x, {1.0, 1.0, 1.0});
  EXPECT_TRUE(SameTensor(same.values, x.values));
  const ProsodySequence y = ApplyScaling(x, {1.0, 2.0, 0.5});
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(y.at(kEnergy, l), 2.0 * x.at(kEnergy, l));
    EXPECT_NEAR(std::exp(y.at(kLogDuration, l)), 0.5 * std::exp(x.at(kLogDuration, l)), 1e-12);
  }
  EXPECT_THROW(ApplyScaling(x, {0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_F(TrainedRun, ExperimentHelpersAreDeterministic) {
  auto val = corpus_->Split(corpus_->validation);
  val.resize(4);
  const std::vector<double> etas = {1.0, 3.0, 5.0, 7.0};
  const auto a = CvSweep(*model_, val, etas, config_->guidance, 2, config_->seed);
  const auto b = CvSweep(*model_, val, etas, config_->guidance, 2, config_->seed);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].eta, etas[i]);
    EXPECT_EQ(a[i].cv, b[i].cv);
  }
  const std::string csv = CvRowsToCsv(a);
  EXPECT_EQ(csv.rfind("eta,cv_pitch,cv_energy,cv_duration\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

  const std::vector<SamplingPath> paths = {SamplingPath::kConditional,
                                           SamplingPath::kUnconditional,
                                           SamplingPath::kZeroText};
  const auto js = EvaluateDivergence(*model_, val, paths, config_->guidance, config_->seed);
  ASSERT_EQ(js.size(), 3u);
  for (const DivergenceRow& row : js) {
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_GE(row.grouped[c], 0.0);
      EXPECT_LE(row.grouped[c], std::log(2.0));
      EXPECT_GE(row.pooled[c], 0.0);
      EXPECT_LE(row.pooled[c], std::log(2.0));
    }
  }
}

TEST(LossCsv, RoundTrip) {
  const std::vector<LossRow> rows = {{1, 0.5, 0.25}, {2, 1.0 / 3.0, 0.1}};
  const auto back = LossRowsFromCsv(LossRowsToCsv(rows));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].loss_c, 1.0 / 3.0);
  EXPECT_THROW(LossRowsFromCsv("wrong\n"), std::runtime_error);
}

TEST(Svg, ChartsAreWellFormed) {
  const std::vector<PlotSeries> series = {{"pitch", {1, 3, 5}, {2.0, 4.0, 3.0}},
                                          {"energy", {1, 3, 5}, {1.0, 1.5, 2.5}}};
  const std::string line = LineChartSvg("CV", "eta", "CV (%)", series);
  EXPECT_EQ(line.rfind("<svg", 0), 0u);
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  EXPECT_NE(line.find("pitch"), std::string::npos);
  const std::string bars = BarChartSvg("JS", {"a", "b", "c"}, series);
  EXPECT_NE(bars.find("<rect"), std::string::npos);
}

}  // namespace
}  // namespace prosodiff
