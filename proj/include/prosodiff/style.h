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

#ifndef PROSODIFF_STYLE_H_
#define PROSODIFF_STYLE_H_

#include <span>
#include <vector>

#include "prosodiff/autograd.h"
#include "prosodiff/denoiser.h"
#include "prosodiff/parameter.h"
#include "prosodiff/rng.h"

namespace prosodiff {

struct StyleConfig {
  int token_count = 10;
  int token_dim = 64;
  int heads = 4;
  int reference_channels = 32;
  int reference_kernel = 3;

  void Validate() const;
  // Token layout reported for the original full-size model: 10 tokens of
  // width 256 attended by 4 heads.
  static StyleConfig FullSize();

  bool operator==(const StyleConfig&) const = default;
};

// Attention distribution over style tokens.
struct TokenWeights {
  std::vector<double> weights;

  // Throws std::invalid_argument unless every weight is >= 0 and the sum is
  // 1 within `tolerance`.
  void RequireSimplex(double tolerance = 1e-9) const;
  static TokenWeights OneHot(int token_count, int token);
  // Divides by the sum; throws if the sum is not positive.
  static TokenWeights Normalized(std::vector<double> raw);
};

// Global style token bank: a reference encoder summarises a prosody
// sequence into a query, multi-head scaled dot-product scores against the
// token keys are softmaxed per head and averaged into one distribution w,
// and the style condition is c = sum_k w_k * value(token_k).
class StyleBank {
 public:
  StyleBank(const StyleConfig& config, Rng& rng);
  StyleBank(const StyleBank&) = delete;
  StyleBank& operator=(const StyleBank&) = delete;
  StyleBank(StyleBank&&) = default;
  StyleBank& operator=(StyleBank&&) = default;

  const StyleConfig& config() const { return config_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  struct Encoded {
    Var condition;  // [token_dim]
    Var weights;    // [1, token_count]
  };

  // reference: [1, 3, L] normalized prosody.
  Encoded Encode(Graph& g, const Tensor& reference) const;
  // w: [1, token_count]. No simplex check.
  Var Condition(Graph& g, const Var& w) const;

  // Gradient-free conveniences.
  std::pair<StyleCondition, TokenWeights> EncodeStyle(
      const Tensor& reference) const;
  StyleCondition ConditionFromWeights(const TokenWeights& w) const;
  // Arbitrary real weights, including negative or super-unit values.
  StyleCondition ConditionFromRawWeights(std::span<const double> w) const;

 private:
  Var Values(Graph& g) const;

  StyleConfig config_;
  ParameterSet params_;
  Var conv1_weight_, conv1_bias_, conv2_weight_, conv2_bias_;
  Var query_in_weight_, query_in_bias_;
  Var tokens_;
  Var query_weight_, key_weight_, value_weight_;
};

}  // namespace prosodiff

#endif  // PROSODIFF_STYLE_H_
