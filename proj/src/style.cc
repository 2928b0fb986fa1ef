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

#include "prosodiff/style.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prosodiff {
namespace {

std::size_t U(int v) { return static_cast<std::size_t>(v); }

}  // namespace

void StyleConfig::Validate() const {
  if (token_count < 2) throw std::invalid_argument("need at least 2 style tokens");
  if (token_dim < 1 || heads < 1 || token_dim % heads != 0) {
    throw std::invalid_argument("attention heads must divide token_dim");
  }
  if (reference_channels < 1) {
    throw std::invalid_argument("reference_channels must be >= 1");
  }
  if (reference_kernel < 1 || reference_kernel % 2 == 0) {
    throw std::invalid_argument("reference_kernel must be odd");
  }
}

StyleConfig StyleConfig::FullSize() {
  StyleConfig c;
  c.token_count = 10;
  c.token_dim = 256;
  c.heads = 4;
  c.reference_channels = 128;
  return c;
}

void TokenWeights::RequireSimplex(double tolerance) const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("token weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw std::invalid_argument("token weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

TokenWeights TokenWeights::OneHot(int token_count, int token) {
  if (token < 0 || token >= token_count) {
    throw std::out_of_range("token id " + std::to_string(token) +
                            " outside 0.." + std::to_string(token_count - 1));
  }
  TokenWeights w;
  w.weights.assign(U(token_count), 0.0);
  w.weights[U(token)] = 1.0;
  return w;
}

TokenWeights TokenWeights::Normalized(std::vector<double> raw) {
  double sum = 0.0;
  for (double v : raw) sum += v;
  if (!(sum > 0.0)) {
    throw std::invalid_argument("token weights must have a positive sum");
  }
  for (double& v : raw) v /= sum;
  return TokenWeights{std::move(raw)};
}

StyleBank::StyleBank(const StyleConfig& config, Rng& rng) : config_(config) {
  config_.Validate();
  const std::size_t r = U(config_.reference_channels);
  const std::size_t k = U(config_.reference_kernel);
  const std::size_t d = U(config_.token_dim);
  const std::size_t n = U(config_.token_count);
  const std::size_t c = kProsodyChannels;
  conv1_weight_ = params_.AddWeight("reference.conv1.weight", {r, c, k}, c * k, rng);
  conv1_bias_ = params_.AddZeros("reference.conv1.bias", {r});
  conv2_weight_ = params_.AddWeight("reference.conv2.weight", {r, r, k}, r * k, rng);
  conv2_bias_ = params_.AddZeros("reference.conv2.bias", {r});
  query_in_weight_ = params_.AddWeight("reference.proj.weight", {d, r}, r, rng);
  query_in_bias_ = params_.AddZeros("reference.proj.bias", {d});
  tokens_ = params_.AddNormal("tokens", {n, d}, 0.5, rng);
  query_weight_ = params_.AddWeight("attention.query.weight", {d, d}, d, rng);
  key_weight_ = params_.AddWeight("attention.key.weight", {d, d}, d, rng);
  value_weight_ = params_.AddWeight("attention.value.weight", {d, d}, d, rng);
}

Var StyleBank::Values(Graph& g) const {
  return ops::Linear(g, ops::Tanh(g, tokens_), value_weight_, nullptr);
}

Var StyleBank::Condition(Graph& g, const Var& w) const {
  const std::size_t n = U(config_.token_count);
  if (w->tensor.rank() != 2 || w->tensor.dim(0) != 1 || w->tensor.dim(1) != n) {
    throw std::invalid_argument("token weights must be [1, " +
                                std::to_string(n) + "], got " +
                                ShapeToString(w->tensor.shape()));
  }
  Var c = ops::MatMul(g, w, Values(g));
  return ops::Reshape(g, c, {U(config_.token_dim)});
}

StyleBank::Encoded StyleBank::Encode(Graph& g, const Tensor& reference) const {
  if (reference.rank() != 3 || reference.dim(0) != 1 ||
      reference.dim(1) != kProsodyChannels) {
    throw std::invalid_argument("style reference must be [1, 3, L], got " +
                                ShapeToString(reference.shape()));
  }
  if (reference.dim(2) == 0) {
    throw std::invalid_argument("style reference is empty");
  }
  Var x = ops::Constant(reference);
  x = ops::Relu(g, ops::Conv1d(g, x, conv1_weight_, conv1_bias_, 1));
  x = ops::Relu(g, ops::Conv1d(g, x, conv2_weight_, conv2_bias_, 2));
  Var summary = ops::MeanOverPositions(g, x);
  Var query = ops::Tanh(g, ops::Linear(g, summary, query_in_weight_, query_in_bias_));

  Var q = ops::Linear(g, query, query_weight_, nullptr);
  Var keys = ops::Linear(g, ops::Tanh(g, tokens_), key_weight_, nullptr);
  const std::size_t heads = U(config_.heads);
  const std::size_t head_dim = U(config_.token_dim) / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  Var weights;
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = ops::SliceColumns(g, q, h * head_dim, head_dim);
    Var kh = ops::SliceColumns(g, keys, h * head_dim, head_dim);
    Var p = ops::Softmax(g, ops::Scale(g, ops::MatMulTransposed(g, qh, kh), scale));
    weights = weights ? ops::Add(g, weights, p) : p;
  }
  weights = ops::Scale(g, weights, 1.0 / static_cast<double>(heads));
  return Encoded{Condition(g, weights), weights};
}

std::pair<StyleCondition, TokenWeights> StyleBank::EncodeStyle(
    const Tensor& reference) const {
  Graph g(/*record=*/false);
  Encoded e = Encode(g, reference);
  TokenWeights w;
  w.weights.assign(e.weights->tensor.values().begin(),
                   e.weights->tensor.values().end());
  return {StyleCondition{std::move(e.condition->tensor)}, std::move(w)};
}

StyleCondition StyleBank::ConditionFromWeights(const TokenWeights& w) const {
  if (w.weights.size() != U(config_.token_count)) {
    throw std::invalid_argument("expected " +
                                std::to_string(config_.token_count) +
                                " token weights, got " +
                                std::to_string(w.weights.size()));
  }
  w.RequireSimplex();
  return ConditionFromRawWeights(w.weights);
}

StyleCondition StyleBank::ConditionFromRawWeights(
    std::span<const double> w) const {
  if (w.size() != U(config_.token_count)) {
    throw std::invalid_argument("expected " +
                                std::to_string(config_.token_count) +
                                " token weights, got " +
                                std::to_string(w.size()));
  }
  Graph g(/*record=*/false);
  Var wv = ops::Constant(Tensor({1, w.size()}, std::vector<double>(w.begin(), w.end())));
  return StyleCondition{std::move(Condition(g, wv)->tensor)};
}

}  // namespace prosodiff
