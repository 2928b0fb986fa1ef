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
#include <limits>
#include <stdexcept>

#include "prosodiff/denoiser.h"
#include "prosodiff/guidance.h"
#include "prosodiff/schedule.h"
#include "test_util.h"

namespace prosodiff {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;

DenoiserConfig TinyConfig() {
  DenoiserConfig c;
  c.residual_layers = 2;
  c.hidden_channels = 4;
  c.time_embedding_dim = 4;
  c.condition_dim = 4;
  c.dilation_cycle = {1, 2};
  return c;
}

std::vector<std::string> NamesOf(const ParameterSet& params) { return params.Names(); }

std::vector<Var> VarsOf(ParameterSet& params) {
  std::vector<Var> vars;
  for (Parameter* p : params.All()) vars.push_back(p->var);
  return vars;
}

Var WeightedSum(Graph& g, const Var& y) {
  Rng rng(77);
  return ops::Sum(g, ops::Mul(g, y, ops::Constant(RandomTensor(y->tensor.shape(), rng))));
}

TEST(DenoiserConfig, Validation) {
  DenoiserConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.residual_layers, 12);
  EXPECT_EQ(c.kernel_size, 3);
  EXPECT_EQ(c.dilation(0), 1);
  EXPECT_EQ(c.dilation(4), 1);
  EXPECT_EQ(c.dilation(7), 8);
  c.kernel_size = 4;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = DenoiserConfig{};
  c.dilation_cycle.clear();
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = DenoiserConfig{};
  c.time_embedding_dim = 3;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(DenoiserConfig, ReceptiveFieldIsTelescopedSum) {
  DenoiserConfig c;
  EXPECT_EQ(c.ReceptiveField(), 1 + 3 * 2 * (1 + 2 + 4 + 8));
}

TEST(TimeEmbedding, DistinctAcrossSteps) {
  const Tensor a = EmbedTime(1, 64, 200);
  const Tensor b = EmbedTime(2, 64, 200);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_GT(diff, 0.0);
  const Tensor again = EmbedTime(1, 64, 200);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], again[i]);

  std::vector<Tensor> all;
  for (int t = 1; t <= 200; ++t) all.push_back(EmbedTime(t, 64, 200));
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < all[i].size(); ++k) {
        d += (all[i][k] - all[j][k]) * (all[i][k] - all[j][k]);
      }
      min_dist = std::min(min_dist, std::sqrt(d));
    }
  }
  EXPECT_GT(min_dist, 0.0);
  EXPECT_THROW(EmbedTime(0, 64, 200), std::out_of_range);
  EXPECT_THROW(EmbedTime(201, 64, 200), std::out_of_range);
}

TEST(TextEmbedder, DeterministicRows) {
  const TextEmbedder a(10, 4, 3), b(10, 4, 3), c(10, 4, 4);
  const std::vector<int> ids = {0, 9, 3, 3};
  const TextEmbedding ea = a.Embed(ids), eb = b.Embed(ids), ec = c.Embed(ids);
  ASSERT_EQ(ea.matrix.shape(), (Shape{4, 4}));
  for (std::size_t i = 0; i < ea.matrix.size(); ++i) EXPECT_EQ(ea.matrix[i], eb.matrix[i]);
  bool differs = false;
  for (std::size_t i = 0; i < ea.matrix.size(); ++i) differs |= ea.matrix[i] != ec.matrix[i];
  EXPECT_TRUE(differs);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(ea.matrix[8 + k], ea.matrix[12 + k]);
  EXPECT_THROW(a.Embed(std::vector<int>{10}), std::out_of_range);
  EXPECT_THROW(a.Embed(std::vector<int>{}), std::invalid_argument);
}

class DenoiserTest : public ::testing::Test {
 protected:
  DenoiserTest()
      : rng_(11),
        conditional_(TinyConfig(), true, rng_),
        unconditional_(TinyConfig(), false, rng_),
        text_(12, 4, 5) {
    Rng r(12);
    testing::Randomize(conditional_.parameters(), r);
    testing::Randomize(unconditional_.parameters(), r);
  }

  Rng rng_;
  Denoiser conditional_;
  Denoiser unconditional_;
  TextEmbedder text_;
};

TEST_F(DenoiserTest, FreshModelShapeAndFinite) {
  Rng rng(1);
  Denoiser fresh(DenoiserConfig{}, true, rng);
  const TextEmbedding y = TextEmbedder(40, 64, 1).Embed(std::vector<int>{1, 2, 3, 4, 5});
  StyleCondition style{RandomTensor({64}, rng)};
  const Tensor x = RandomTensor({2, 3, 5}, rng);
  const Tensor out = fresh.PredictNoise(x, 10, 200, y, &style);
  EXPECT_EQ(out.shape(), (Shape{2, 3, 5}));
  for (double v : out.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST_F(DenoiserTest, DeterministicOutputs) {
  Rng rng(2);
  const TextEmbedding y = text_.Embed(std::vector<int>{1, 2, 3, 4});
  StyleCondition style{RandomTensor({4}, rng)};
  const Tensor x = RandomTensor({1, 3, 4}, rng);
  const Tensor a = conditional_.PredictNoise(x, 3, 10, y, &style);
  const Tensor b = conditional_.PredictNoise(x, 3, 10, y, &style);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST_F(DenoiserTest, PreparedConditionMatchesDirectForward) {
  Rng rng(3);
  const TextEmbedding y = text_.Embed(std::vector<int>{4, 5, 6});
  StyleCondition style{RandomTensor({4}, rng)};
  const Tensor x = RandomTensor({2, 3, 3}, rng);
  const auto prepared = conditional_.PrepareCondition(y, &style);
  const Tensor a = conditional_.PredictNoise(x, 7, 10, y, &style);
  const Tensor b = conditional_.PredictNoise(x, 7, 10, prepared);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_THROW(conditional_.PredictNoise(RandomTensor({1, 3, 4}, rng), 7, 10, prepared),
               std::invalid_argument);
}

TEST_F(DenoiserTest, StyleContract) {
  Rng rng(4);
  const TextEmbedding y = text_.Embed(std::vector<int>{1, 2});
  StyleCondition style{RandomTensor({4}, rng)};
  const Tensor x = RandomTensor({1, 3, 2}, rng);
  EXPECT_THROW(conditional_.PredictNoise(x, 1, 10, y, nullptr), std::invalid_argument);
  EXPECT_THROW(unconditional_.PredictNoise(x, 1, 10, y, &style), std::invalid_argument);
  EXPECT_THROW(conditional_.PredictNoise(x, 1, 10, text_.Embed(std::vector<int>{1}), &style),
               std::invalid_argument);
}

TEST_F(DenoiserTest, NetworksShareNoParameters) {
  Rng rng(5);
  const TextEmbedding y = text_.Embed(std::vector<int>{1, 2, 3});
  const Tensor x = RandomTensor({1, 3, 3}, rng);
  const Tensor before = unconditional_.PredictNoise(x, 4, 10, y, nullptr);
  EXPECT_EQ(NamesOf(conditional_.parameters()), NamesOf(unconditional_.parameters()));
  for (Parameter* p : conditional_.parameters().All()) {
    EXPECT_NE(p->var, unconditional_.parameters().Get(p->name).var);
    for (double& v : p->tensor().values()) v += 1.0;
  }
  const Tensor after = unconditional_.PredictNoise(x, 4, 10, y, nullptr);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i], after[i]);
}

TEST_F(DenoiserTest, Bidirectional) {
  Rng rng(6);
  const std::size_t len = 9, center = 4;
  const TextEmbedding y = text_.Embed(std::vector<int>(len, 2));
  StyleCondition style{RandomTensor({4}, rng)};
  const Tensor x = RandomTensor({1, 3, len}, rng);
  const Tensor base = conditional_.PredictNoise(x, 5, 10, y, &style);
  for (std::size_t pos : {center - 1, center + 1}) {
    Tensor moved = x;
    moved.at(0, 0, pos) += 1.0;
    const Tensor out = conditional_.PredictNoise(moved, 5, 10, y, &style);
    double change = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      change += std::abs(out.at(0, c, center) - base.at(0, c, center));
    }
    EXPECT_GT(change, 0.0) << "input position " << pos;
  }
  Tensor far = x;
  far.at(0, 0, len - 1) += 1.0;
  const Tensor out = conditional_.PredictNoise(far, 5, 10, y, &style);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(out.at(0, c, 0), base.at(0, c, 0));
}

TEST_F(DenoiserTest, ForwardGradientsMatchFiniteDifferences) {
  Rng rng(7);
  const TextEmbedding y = text_.Embed(std::vector<int>{1, 5, 7, 2});
  Var style = testing::RandomVar({4}, rng);
  Var x = testing::RandomVar({2, 3, 4}, rng, 0.5);
  std::vector<Var> inputs = VarsOf(conditional_.parameters());
  std::vector<std::string> names = NamesOf(conditional_.parameters());
  inputs.push_back(style);
  names.push_back("style");
  inputs.push_back(x);
  names.push_back("x_t");
  auto loss = [&](Graph& g) {
    return WeightedSum(g, conditional_.Forward(g, x, 3, 10, y, style));
  };
  const auto report = CheckGradients(loss, inputs, names);
  EXPECT_LT(report.max_relative_error, 1e-4) << report.worst;
}

TEST_F(DenoiserTest, DiffusionLossGradientsMatchFiniteDifferences) {
  Rng rng(8);
  const NoiseSchedule schedule = NoiseSchedule::Cosine(10);
  const TextEmbedding y = text_.Embed(std::vector<int>{3, 1, 4, 1});
  const Tensor x0 = RandomTensor({1, 3, 4}, rng);
  const Tensor eps = RandomTensor({1, 3, 4}, rng);
  Var style = testing::RandomVar({4}, rng);
  auto loss = [&](Graph& g) {
    return DiffusionLoss(g, conditional_, x0, 6, eps, y, style, schedule);
  };
  const auto report = CheckGradients(loss, VarsOf(conditional_.parameters()),
                                     NamesOf(conditional_.parameters()));
  EXPECT_LT(report.max_relative_error, 1e-4) << report.worst;
}

TEST(DenoiserBypass, StyleEntersThroughOwnProjection) {
  DenoiserConfig config = TinyConfig();
  config.style_in_condition = false;
  Rng rng(9);
  Denoiser model(config, true, rng);
  Rng r(10);
  testing::Randomize(model.parameters(), r);
  const TextEmbedding y = TextEmbedder(8, 4, 1).Embed(std::vector<int>{1, 2, 3});
  Var style = testing::RandomVar({4}, rng);
  Var x = testing::RandomVar({1, 3, 3}, rng, 0.5);
  std::vector<Var> inputs;
  for (Parameter* p : model.parameters().All()) inputs.push_back(p->var);
  inputs.push_back(style);
  auto loss = [&](Graph& g) { return WeightedSum(g, model.Forward(g, x, 2, 10, y, style)); };
  EXPECT_LT(CheckGradients(loss, inputs).max_relative_error, 1e-4);
}

TEST(DenoiserNoText, OutputIgnoresPhonemes) {
  DenoiserConfig config = TinyConfig();
  config.use_text = false;
  Rng rng(13);
  Denoiser model(config, true, rng);
  Rng r(14);
  testing::Randomize(model.parameters(), r);
  const TextEmbedder text(8, 4, 1);
  StyleCondition style{RandomTensor({4}, rng)};
  const Tensor x = RandomTensor({1, 3, 3}, rng);
  const Tensor a = model.PredictNoise(x, 2, 10, text.Embed(std::vector<int>{1, 2, 3}), &style);
  const Tensor b = model.PredictNoise(x, 2, 10, text.Embed(std::vector<int>{7, 0, 5}), &style);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace prosodiff
