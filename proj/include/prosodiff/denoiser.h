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

#ifndef PROSODIFF_DENOISER_H_
#define PROSODIFF_DENOISER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prosodiff/autograd.h"
#include "prosodiff/parameter.h"
#include "prosodiff/rng.h"
#include "prosodiff/tensor.h"

namespace prosodiff {

inline constexpr std::size_t kProsodyChannels = 3;

struct DenoiserConfig {
  int residual_layers = 12;
  // Width of the residual stream; one channel per explicit prosody feature.
  int residual_channels = 3;
  int kernel_size = 3;
  std::vector<int> dilation_cycle = {1, 2, 4, 8};
  // Width of the gate and conditioner projections inside each layer.
  int hidden_channels = 64;
  int time_embedding_dim = 64;
  int condition_dim = 64;
  // Ablation switches. Without text the phoneme embedding is replaced by
  // zeros; without style-in-condition the style vector bypasses the
  // y + c sum and enters every gate through its own projection.
  bool use_text = true;
  bool style_in_condition = true;

  void Validate() const;
  int dilation(int layer) const;
  // Width of the input window that can influence one output position.
  int ReceptiveField() const;

  bool operator==(const DenoiserConfig&) const = default;
};

// Per-phoneme text condition, [L, condition_dim].
struct TextEmbedding {
  Tensor matrix;
  std::size_t length() const { return matrix.dim(0); }
};

// Sentence-level style condition, [condition_dim].
struct StyleCondition {
  Tensor vector;
};

// Fixed phoneme identity table. Rows are drawn once from the text-table
// substream of the run seed; the denoisers learn their own projections of it.
class TextEmbedder {
 public:
  TextEmbedder() = default;
  TextEmbedder(int vocab_size, int dim, std::uint64_t seed);
  explicit TextEmbedder(Tensor table);

  TextEmbedding Embed(std::span<const int> phoneme_ids) const;
  const Tensor& table() const { return table_; }
  int vocab_size() const { return static_cast<int>(table_.dim(0)); }

 private:
  Tensor table_;
};

// Sinusoidal step embedding: sin(t * w_i) for the first half of the
// vector and cos(t * w_i) for the second, w_i = 10000^(-i / (half - 1)).
Tensor EmbedTime(int t, int dim, int max_step);

// Noise predictor: a stack of gated residual layers with bidirectional
// dilated convolutions. The conditional instance takes a style vector, the
// unconditional one does not; both share the same parameter layout.
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& config, bool accepts_style, Rng& rng);
  Denoiser(const Denoiser&) = delete;
  Denoiser& operator=(const Denoiser&) = delete;
  Denoiser(Denoiser&&) = default;
  Denoiser& operator=(Denoiser&&) = default;

  const DenoiserConfig& config() const { return config_; }
  bool accepts_style() const { return accepts_style_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  // Projected text and style conditions; independent of x_t and t, so one
  // preparation serves a whole reverse trajectory.
  struct PreparedCondition {
    Var projected;        // [1, layers * 2H, L]
    Var style_projected;  // [1, layers * 2H] when style bypasses the sum
    std::size_t length = 0;
  };
  PreparedCondition PrepareCondition(Graph& g, const TextEmbedding& y,
                                     const Var& style) const;
  PreparedCondition PrepareCondition(const TextEmbedding& y,
                                     const StyleCondition* style) const;

  // x_t: [B, 3, L]; y: [L, condition_dim]; style: [condition_dim] or null.
  // Returns the noise estimate, [B, 3, L].
  Var Forward(Graph& g, const Var& x_t, int t, int max_step,
              const TextEmbedding& y, const Var& style) const;
  Var Forward(Graph& g, const Var& x_t, int t, int max_step,
              const PreparedCondition& condition) const;

  // Gradient-free evaluation.
  Tensor PredictNoise(const Tensor& x_t, int t, int max_step,
                      const TextEmbedding& y,
                      const StyleCondition* style) const;
  Tensor PredictNoise(const Tensor& x_t, int t, int max_step,
                      const PreparedCondition& condition) const;

 private:
  struct Layer {
    Var time_weight, time_bias;
    Var dilated_weight, dilated_bias;
    Var output_weight, output_bias;
  };

  DenoiserConfig config_;
  bool accepts_style_;
  ParameterSet params_;
  Var input_weight_, input_bias_;
  Var time_fc1_weight_, time_fc1_bias_, time_fc2_weight_, time_fc2_bias_;
  Var condition_weight_;
  Var null_condition_;
  Var style_weight_;
  std::vector<Layer> layers_;
  Var skip_weight_, skip_bias_, out_weight_, out_bias_;
};

}  // namespace prosodiff

#endif  // PROSODIFF_DENOISER_H_
