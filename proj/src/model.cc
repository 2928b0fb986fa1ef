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

#include "prosodiff/model.h"

#include <cmath>
#include <stdexcept>

#include "prosodiff/checkpoint.h"
#include "prosodiff/format.h"

namespace prosodiff {

ProsodyModel::ProsodyModel(const RunConfig& config,
                           const NormalizationStats& stats)
    : ProsodyModel(config, stats, Rng(config.seed, Stream::kInit)) {}

ProsodyModel::ProsodyModel(const RunConfig& config,
                           const NormalizationStats& stats, Rng&& init)
    : config_(config),
      stats_(stats),
      conditional_(config.denoiser, /*accepts_style=*/true, init),
      unconditional_(config.denoiser, /*accepts_style=*/false, init),
      bank_(config.style, init),
      text_(config.corpus.vocab_size, config.denoiser.condition_dim, config.seed),
      schedule_(NoiseSchedule::Cosine(config.diffusion_steps)) {
  config_.Validate();
}

ProsodyModel ProsodyModel::Load(const std::string& path,
                                const RunConfig& config) {
  const std::vector<NamedTensor> entries = ReadCheckpoint(path);
  NormalizationStats stats;
  const Tensor& mean = FindEntry(entries, "norm/mean").tensor;
  const Tensor& stddev = FindEntry(entries, "norm/stddev").tensor;
  if (mean.size() != 3 || stddev.size() != 3) {
    throw std::runtime_error("checkpoint normalization entries must hold 3 values");
  }
  for (std::size_t c = 0; c < 3; ++c) {
    stats.mean[c] = mean[c];
    stats.stddev[c] = stddev[c];
  }
  ProsodyModel model(config, stats);
  RestoreParameters(entries, "theta1/", &model.conditional_.parameters());
  RestoreParameters(entries, "theta2/", &model.unconditional_.parameters());
  RestoreParameters(entries, "style/", &model.bank_.parameters());
  const Tensor& table = FindEntry(entries, "text/table").tensor;
  if (table.shape() != model.text_.table().shape()) {
    throw std::runtime_error("checkpoint text table " +
                             ShapeToString(table.shape()) +
                             " does not match config " +
                             ShapeToString(model.text_.table().shape()));
  }
  model.text_ = TextEmbedder(table);
  const Tensor& steps = FindEntry(entries, "schedule/steps").tensor;
  if (static_cast<int>(steps[0]) != config.diffusion_steps) {
    throw std::runtime_error("checkpoint was trained with " +
                             std::to_string(static_cast<int>(steps[0])) +
                             " diffusion steps, config has " +
                             std::to_string(config.diffusion_steps));
  }
  model.step_ = static_cast<int>(FindEntry(entries, "train/step").tensor[0]);
  return model;
}

void ProsodyModel::Save(const std::string& path) const {
  std::vector<NamedTensor> entries;
  entries.push_back({"train/step", Tensor::Scalar(step_)});
  entries.push_back({"schedule/steps", Tensor::Scalar(schedule_.steps())});
  entries.push_back(
      {"norm/mean", Tensor({3}, {stats_.mean[0], stats_.mean[1], stats_.mean[2]})});
  entries.push_back({"norm/stddev", Tensor({3}, {stats_.stddev[0], stats_.stddev[1],
                                                 stats_.stddev[2]})});
  entries.push_back({"text/table", text_.table()});
  AppendParameters(conditional_.parameters(), "theta1/", true, &entries);
  AppendParameters(unconditional_.parameters(), "theta2/", true, &entries);
  AppendParameters(bank_.parameters(), "style/", true, &entries);
  WriteCheckpoint(path, entries);
}

std::pair<StyleCondition, TokenWeights> ProsodyModel::EncodeReference(
    const ProsodySequence& reference) const {
  return bank_.EncodeStyle(NormalizeTensor(reference.values, stats_));
}

ProsodySequence Generate(const ProsodyModel& model,
                         const GenerationRequest& request,
                         std::vector<StepDiagnostics>* diagnostics) {
  TextEmbedding y = model.text().Embed(request.phoneme_ids);
  if (request.zero_text) y.matrix = Tensor(y.matrix.shape());
  Rng rng(request.seed, Stream::kSampling, request.index);
  const StyleCondition* style = request.style ? &*request.style : nullptr;
  Tensor x = Sample(model.conditional(), model.unconditional(), y, style,
                    request.guidance, model.schedule(), rng, 1, diagnostics);
  ProsodySequence out(DenormalizeTensor(x, model.stats()));
  if (request.scale != std::array<double, 3>{1.0, 1.0, 1.0}) {
    out = ApplyScaling(out, request.scale);
  }
  return out;
}

ProsodySequence ApplyScaling(const ProsodySequence& x,
                             const std::array<double, 3>& factors) {
  for (double f : factors) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw std::invalid_argument("scaling factors must be finite and > 0");
    }
  }
  ProsodySequence out = x;
  for (std::size_t l = 0; l < x.length(); ++l) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (factors[c] == 1.0) continue;
      if (c == kEnergy) {
        out.at(c, l) = x.at(c, l) * factors[c];
      } else {
        out.at(c, l) = x.at(c, l) + std::log(factors[c]);
      }
    }
  }
  return out;
}

std::string DiagnosticsToCsv(const std::vector<StepDiagnostics>& diagnostics) {
  std::string out = "t,sigma_cond,sigma_cfg,applied_ratio\n";
  for (const StepDiagnostics& d : diagnostics) {
    out += std::to_string(d.t) + "," + FormatDouble(d.rescale.sigma_cond) + "," +
           FormatDouble(d.rescale.sigma_cfg) + "," +
           FormatDouble(d.rescale.applied_ratio) + "\n";
  }
  return out;
}

}  // namespace prosodiff
