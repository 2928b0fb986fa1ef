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

#ifndef PROSODIFF_GUIDANCE_H_
#define PROSODIFF_GUIDANCE_H_

#include <span>
#include <vector>

#include "prosodiff/autograd.h"
#include "prosodiff/denoiser.h"
#include "prosodiff/parameter.h"
#include "prosodiff/rng.h"
#include "prosodiff/schedule.h"
#include "prosodiff/style.h"
#include "prosodiff/tensor.h"

namespace prosodiff {

struct GuidanceParams {
  double eta = 1.0;    // guiding scale
  double gamma = 0.7;  // correction scale
  double tau = 1.0;    // terminal temperature; x_T ~ N(0, I / tau)

  void Validate() const;

  bool operator==(const GuidanceParams&) const = default;
};

struct RescaleDiagnostics {
  double sigma_cond = 0.0;
  double sigma_cfg = 0.0;
  double applied_ratio = 1.0;
};

// Below this guided-estimate spread the correction is skipped.
inline constexpr double kMinGuidedStd = 1e-12;

// Mean squared error between eps and the denoiser's estimate at x_t, where
// x_t is the closed-form forward sample of x0 at step t.
Var DiffusionLoss(Graph& g, const Denoiser& model, const Tensor& x0, int t,
                  const Tensor& eps, const TextEmbedding& y, const Var& style,
                  const NoiseSchedule& schedule);

// eps_nc + eta * (eps_c - eps_nc). eta == 1 returns eps_c unchanged.
Tensor CfgCombine(const Tensor& eps_c, const Tensor& eps_nc, double eta);

// Pulls the spread of each batch element of `combined` toward the spread of
// the matching element of eps_c: with r = sigma_cond / sigma_cfg,
// final = combined + gamma * (combined * r - combined).
Tensor Rescale(const Tensor& combined, const Tensor& eps_c, double gamma,
               std::vector<RescaleDiagnostics>* diagnostics = nullptr);

// Population standard deviation over all elements of one batch item.
double ExampleStd(const Tensor& x, std::size_t batch_index);

// Ancestral step x_t -> x_{t-1} using the posterior variance; no noise is
// added at t = 1.
Tensor ReverseStep(const Tensor& x_t, int t, const Tensor& eps_hat,
                   const NoiseSchedule& schedule, Rng& rng);

struct StepDiagnostics {
  int t = 0;
  RescaleDiagnostics rescale;
};

// Terminal draw x_T ~ N(0, I / tau) of shape [batch, 3, length].
Tensor DrawTerminal(std::size_t batch, std::size_t length, double tau,
                    Rng& rng);

// Full reverse process. With a style condition and eta != 0 every step
// combines both denoisers and applies the correction; without a style
// condition, or with eta == 0, only the unconditional denoiser is consulted.
Tensor Sample(const Denoiser& conditional, const Denoiser& unconditional,
              const TextEmbedding& y, const StyleCondition* style,
              const GuidanceParams& params, const NoiseSchedule& schedule,
              Rng& rng, std::size_t batch = 1,
              std::vector<StepDiagnostics>* diagnostics = nullptr);

struct TrainExample {
  const Tensor* x0;         // [1, 3, L] normalized prosody
  TextEmbedding text;       // [L, condition_dim]
  const Tensor* reference;  // [1, 3, L'] style reference
};

struct TrainLosses {
  double conditional = 0.0;
  double unconditional = 0.0;
};

struct TrainStepOptions {
  bool update_conditional = true;    // also updates the style bank
  bool update_unconditional = true;
};

// One optimisation step over a batch: draws t ~ U{1..T} and eps per example,
// backpropagates the conditional loss into the conditional denoiser and the
// style bank, and the unconditional loss into the unconditional denoiser.
TrainLosses TrainStep(Denoiser& conditional, Denoiser& unconditional,
                      StyleBank& bank, std::span<const TrainExample> batch,
                      const NoiseSchedule& schedule, const AdamConfig& adam,
                      Rng& rng, const TrainStepOptions& options = {});

}  // namespace prosodiff

#endif  // PROSODIFF_GUIDANCE_H_
