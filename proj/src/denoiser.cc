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

#include "prosodiff/denoiser.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "prosodiff/schedule.h"

namespace prosodiff {
namespace {

std::size_t U(int v) { return static_cast<std::size_t>(v); }

}  // namespace

void DenoiserConfig::Validate() const {
  if (residual_layers < 1) {
    throw std::invalid_argument("denoiser needs at least one residual layer");
  }
  if (residual_channels != static_cast<int>(kProsodyChannels)) {
    throw std::invalid_argument(
        "residual_channels must equal the number of prosody channels (3)");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("kernel_size must be odd");
  }
  if (dilation_cycle.empty()) {
    throw std::invalid_argument("dilation_cycle must not be empty");
  }
  for (int d : dilation_cycle) {
    if (d < 1) throw std::invalid_argument("dilations must be >= 1");
  }
  if (hidden_channels < 1 || condition_dim < 1) {
    throw std::invalid_argument("hidden_channels and condition_dim must be >= 1");
  }
  if (time_embedding_dim < 4 || time_embedding_dim % 2 != 0) {
    throw std::invalid_argument("time_embedding_dim must be even and >= 4");
  }
}

int DenoiserConfig::dilation(int layer) const {
  return dilation_cycle[U(layer) % dilation_cycle.size()];
}

int DenoiserConfig::ReceptiveField() const {
  int field = 1;
  for (int l = 0; l < residual_layers; ++l) {
    field += (kernel_size - 1) * dilation(l);
  }
  return field;
}

TextEmbedder::TextEmbedder(int vocab_size, int dim, std::uint64_t seed) {
  if (vocab_size < 1 || dim < 1) {
    throw std::invalid_argument("text table needs positive vocab and dim");
  }
  Rng rng(seed, Stream::kTextTable);
  table_ = Tensor({U(vocab_size), U(dim)});
  for (double& v : table_.values()) v = rng.Normal();
}

TextEmbedder::TextEmbedder(Tensor table) : table_(std::move(table)) {
  if (table_.rank() != 2) throw std::invalid_argument("text table must be 2-D");
}

TextEmbedding TextEmbedder::Embed(std::span<const int> phoneme_ids) const {
  if (phoneme_ids.empty()) {
    throw std::invalid_argument("cannot embed an empty phoneme sequence");
  }
  const std::size_t dim = table_.dim(1);
  TextEmbedding out{Tensor({phoneme_ids.size(), dim})};
  for (std::size_t l = 0; l < phoneme_ids.size(); ++l) {
    const int id = phoneme_ids[l];
    if (id < 0 || id >= vocab_size()) {
      throw std::out_of_range("phoneme id " + std::to_string(id) +
                              " outside vocabulary of " +
                              std::to_string(vocab_size()));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      out.matrix[l * dim + d] = table_[U(id) * dim + d];
    }
  }
  return out;
}

Tensor EmbedTime(int t, int dim, int max_step) {
  if (t < 1 || t > max_step) {
    throw std::out_of_range("time step " + std::to_string(t) + " outside 1.." +
                            std::to_string(max_step));
  }
  if (dim < 4 || dim % 2 != 0) {
    throw std::invalid_argument("time embedding dim must be even and >= 4");
  }
  const std::size_t half = U(dim / 2);
  Tensor out({1, U(dim)});
  for (std::size_t i = 0; i < half; ++i) {
    const double freq =
        std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(half - 1));
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
  return out;
}

Denoiser::Denoiser(const DenoiserConfig& config, bool accepts_style, Rng& rng)
    : config_(config), accepts_style_(accepts_style) {
  config_.Validate();
  const std::size_t c = kProsodyChannels;
  const std::size_t h = U(config_.hidden_channels);
  const std::size_t k = U(config_.kernel_size);
  const std::size_t d = U(config_.condition_dim);
  const std::size_t te = U(config_.time_embedding_dim);
  const std::size_t tw = h;
  const std::size_t n = U(config_.residual_layers);

  input_weight_ = params_.AddWeight("input.weight", {c, c, 1}, c, rng);
  input_bias_ = params_.AddZeros("input.bias", {c});
  time_fc1_weight_ = params_.AddWeight("time.fc1.weight", {tw, te}, te, rng);
  time_fc1_bias_ = params_.AddZeros("time.fc1.bias", {tw});
  time_fc2_weight_ = params_.AddWeight("time.fc2.weight", {tw, tw}, tw, rng);
  time_fc2_bias_ = params_.AddZeros("time.fc2.bias", {tw});
  // One projection for every layer's conditioner, sliced per layer.
  condition_weight_ =
      params_.AddWeight("condition.weight", {n * 2 * h, d, 1}, d, rng);
  null_condition_ = params_.AddZeros("condition.null", {d});
  if (!config_.style_in_condition) {
    style_weight_ = params_.AddWeight("style.weight", {n * 2 * h, d}, d, rng);
  }
  for (std::size_t l = 0; l < n; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    Layer layer;
    layer.time_weight = params_.AddWeight(p + "time.weight", {c, tw}, tw, rng);
    layer.time_bias = params_.AddZeros(p + "time.bias", {c});
    layer.dilated_weight =
        params_.AddWeight(p + "dilated.weight", {2 * h, c, k}, c * k, rng);
    layer.dilated_bias = params_.AddZeros(p + "dilated.bias", {2 * h});
    layer.output_weight =
        params_.AddWeight(p + "output.weight", {2 * c, h, 1}, h, rng);
    layer.output_bias = params_.AddZeros(p + "output.bias", {2 * c});
    layers_.push_back(std::move(layer));
  }
  skip_weight_ = params_.AddWeight("skip.weight", {h, c, 1}, c, rng);
  skip_bias_ = params_.AddZeros("skip.bias", {h});
  out_weight_ = params_.AddWeight("out.weight", {c, h, 1}, h, rng);
  out_bias_ = params_.AddZeros("out.bias", {c});
}

Denoiser::PreparedCondition Denoiser::PrepareCondition(
    Graph& g, const TextEmbedding& y, const Var& style) const {
  if (accepts_style_ && !style) {
    throw std::invalid_argument(
        "conditional denoiser requires a style condition");
  }
  if (!accepts_style_ && style) {
    throw std::invalid_argument(
        "unconditional denoiser does not take a style condition");
  }
  const std::size_t d = U(config_.condition_dim);
  if (y.matrix.rank() != 2 || y.matrix.dim(1) != d || y.length() == 0) {
    throw std::invalid_argument("text embedding must be [L, " +
                                std::to_string(d) + "], got " +
                                ShapeToString(y.matrix.shape()));
  }
  const std::size_t length = y.length();
  if (style && (style->tensor.rank() != 1 || style->tensor.dim(0) != d)) {
    throw std::invalid_argument("style condition must be [" +
                                std::to_string(d) + "], got " +
                                ShapeToString(style->tensor.shape()));
  }
  // Condition: y + c (or y + learned null vector for the unconditional net).
  Var text = config_.use_text
                 ? ops::TransposeToSequence(g, ops::Constant(y.matrix))
                 : ops::Constant(Tensor({1, d, length}));
  Var sentence = null_condition_;
  if (style && config_.style_in_condition) {
    sentence = ops::Add(g, null_condition_, style);
  }
  Var condition = ops::AddOverPositions(g, text, sentence);
  Var projected = ops::Conv1d(g, condition, condition_weight_, nullptr, 1);
  Var style_projected;
  if (!config_.style_in_condition) {
    Var source = style ? style : ops::Constant(Tensor({d}));
    style_projected = ops::Linear(
        g, ops::Reshape(g, source, {1, d}), style_weight_, nullptr);
  }
  return PreparedCondition{projected, style_projected, length};
}

Var Denoiser::Forward(Graph& g, const Var& x_t, int t, int max_step,
                      const TextEmbedding& y, const Var& style) const {
  return Forward(g, x_t, t, max_step, PrepareCondition(g, y, style));
}

Var Denoiser::Forward(Graph& g, const Var& x_t, int t, int max_step,
                      const PreparedCondition& cond) const {
  const Tensor& xt = x_t->tensor;
  if (xt.rank() != 3 || xt.dim(1) != kProsodyChannels) {
    throw std::invalid_argument("denoiser input must be [B, 3, L], got " +
                                ShapeToString(xt.shape()));
  }
  if (xt.dim(2) != cond.length) {
    throw std::invalid_argument("denoiser input length " +
                                std::to_string(xt.dim(2)) +
                                " does not match condition length " +
                                std::to_string(cond.length));
  }
  const std::size_t h = U(config_.hidden_channels);
  const std::size_t c = kProsodyChannels;
  const Var& projected = cond.projected;
  const Var& style_projected = cond.style_projected;

  Var time = ops::Constant(EmbedTime(t, config_.time_embedding_dim, max_step));
  time = ops::Silu(g, ops::Linear(g, time, time_fc1_weight_, time_fc1_bias_));
  time = ops::Silu(g, ops::Linear(g, time, time_fc2_weight_, time_fc2_bias_));

  Var residual = ops::Conv1d(g, x_t, input_weight_, input_bias_, 1);
  Var skip;
  const double residual_scale = 1.0 / std::sqrt(2.0);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Var step = ops::Reshape(
        g, ops::Linear(g, time, layer.time_weight, layer.time_bias), {c});
    Var hidden = ops::AddOverPositions(g, residual, step);
    Var gate_in = ops::Conv1d(g, hidden, layer.dilated_weight,
                              layer.dilated_bias, config_.dilation(int(l)));
    gate_in = ops::AddAcrossBatch(
        g, gate_in, ops::SliceChannels(g, projected, l * 2 * h, 2 * h));
    if (style_projected) {
      gate_in = ops::AddOverPositions(
          g, gate_in,
          ops::Reshape(g, ops::SliceColumns(g, style_projected, l * 2 * h, 2 * h),
                       {2 * h}));
    }
    Var gated = ops::GatedActivation(g, ops::SliceChannels(g, gate_in, 0, h),
                                     ops::SliceChannels(g, gate_in, h, h));
    Var out = ops::Conv1d(g, gated, layer.output_weight, layer.output_bias, 1);
    residual = ops::Scale(
        g, ops::Add(g, residual, ops::SliceChannels(g, out, 0, c)),
        residual_scale);
    Var skip_part = ops::SliceChannels(g, out, c, c);
    skip = skip ? ops::Add(g, skip, skip_part) : skip_part;
  }
  skip = ops::Scale(g, skip, 1.0 / std::sqrt(static_cast<double>(layers_.size())));
  Var hidden = ops::Relu(g, ops::Conv1d(g, skip, skip_weight_, skip_bias_, 1));
  // Noise estimate of a unit-variance input plus a learned residual.
  const double gain = std::sqrt(1.0 - NoiseSchedule::Cosine(max_step).alpha_bar(t));
  return ops::Add(g, ops::Conv1d(g, hidden, out_weight_, out_bias_, 1),
                  ops::Scale(g, x_t, gain));
}

Tensor Denoiser::PredictNoise(const Tensor& x_t, int t, int max_step,
                              const TextEmbedding& y,
                              const StyleCondition* style) const {
  Graph g(/*record=*/false);
  Var s = style ? ops::Constant(style->vector) : nullptr;
  Var out = Forward(g, ops::Constant(x_t), t, max_step, y, s);
  return std::move(out->tensor);
}

Denoiser::PreparedCondition Denoiser::PrepareCondition(
    const TextEmbedding& y, const StyleCondition* style) const {
  Graph g(/*record=*/false);
  return PrepareCondition(g, y, style ? ops::Constant(style->vector) : nullptr);
}

Tensor Denoiser::PredictNoise(const Tensor& x_t, int t, int max_step,
                              const PreparedCondition& cond) const {
  Graph g(/*record=*/false);
  Var out = Forward(g, ops::Constant(x_t), t, max_step, cond);
  return std::move(out->tensor);
}

}  // namespace prosodiff
