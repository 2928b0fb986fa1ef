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

#include "prosodiff/guidance.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prosodiff {

void GuidanceParams::Validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("guiding scale eta must be finite and >= 0");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("correction scale gamma must lie in [0, 1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("temperature tau must be finite and > 0");
  }
}

Var DiffusionLoss(Graph& g, const Denoiser& model, const Tensor& x0, int t,
                  const Tensor& eps, const TextEmbedding& y, const Var& style,
                  const NoiseSchedule& schedule) {
  Tensor x_t = ForwardDiffuse(x0, t, eps, schedule);
  Var prediction =
      model.Forward(g, ops::Constant(std::move(x_t)), t, schedule.steps(), y, style);
  return ops::MeanSquaredError(g, prediction, ops::Constant(eps));
}

Tensor CfgCombine(const Tensor& eps_c, const Tensor& eps_nc, double eta) {
  RequireSameShape(eps_c, eps_nc, "cfg_combine");
  if (eta == 1.0) return eps_c;
  Tensor out(eps_c.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = eps_nc[i] + eta * (eps_c[i] - eps_nc[i]);
  }
  return out;
}

double ExampleStd(const Tensor& x, std::size_t batch_index) {
  const std::size_t per = x.size() / x.dim(0);
  const double* v = x.data() + batch_index * per;
  double mean = 0.0;
  for (std::size_t i = 0; i < per; ++i) mean += v[i];
  mean /= static_cast<double>(per);
  double ss = 0.0;
  for (std::size_t i = 0; i < per; ++i) ss += (v[i] - mean) * (v[i] - mean);
  return std::sqrt(ss / static_cast<double>(per));
}

Tensor Rescale(const Tensor& combined, const Tensor& eps_c, double gamma,
               std::vector<RescaleDiagnostics>* diagnostics) {
  RequireSameShape(combined, eps_c, "rescale");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("correction scale gamma must lie in [0, 1]");
  }
  if (combined.rank() < 1 || combined.size() == 0) {
    throw std::invalid_argument("rescale: empty input");
  }
  const std::size_t batch = combined.dim(0);
  const std::size_t per = combined.size() / batch;
  Tensor out(combined.shape());
  if (diagnostics) diagnostics->clear();
  for (std::size_t b = 0; b < batch; ++b) {
    RescaleDiagnostics d;
    d.sigma_cond = ExampleStd(eps_c, b);
    d.sigma_cfg = ExampleStd(combined, b);
    d.applied_ratio =
        d.sigma_cfg < kMinGuidedStd ? 1.0 : d.sigma_cond / d.sigma_cfg;
    const double* src = combined.data() + b * per;
    double* dst = out.data() + b * per;
    for (std::size_t i = 0; i < per; ++i) {
      const double rescaled = src[i] * d.applied_ratio;
      dst[i] = src[i] + gamma * (rescaled - src[i]);
    }
    if (diagnostics) diagnostics->push_back(d);
  }
  return out;
}

Tensor ReverseStep(const Tensor& x_t, int t, const Tensor& eps_hat,
                   const NoiseSchedule& schedule, Rng& rng) {
  RequireSameShape(x_t, eps_hat, "reverse_step");
  if (t < 1 || t > schedule.steps()) {
    throw std::out_of_range("reverse_step: step " + std::to_string(t) +
                            " outside 1.." + std::to_string(schedule.steps()));
  }
  const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha(t));
  const double eps_coef = schedule.beta(t) / std::sqrt(1.0 - schedule.alpha_bar(t));
  const double sigma = t > 1 ? std::sqrt(schedule.posterior_variance(t)) : 0.0;
  Tensor out(x_t.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mean = inv_sqrt_alpha * (x_t[i] - eps_coef * eps_hat[i]);
    out[i] = t > 1 ? mean + sigma * rng.Normal() : mean;
  }
  return out;
}

Tensor DrawTerminal(std::size_t batch, std::size_t length, double tau,
                    Rng& rng) {
  if (!(tau > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const double scale = 1.0 / std::sqrt(tau);
  Tensor x({batch, kProsodyChannels, length});
  for (double& v : x.values()) v = scale * rng.Normal();
  return x;
}

Tensor Sample(const Denoiser& conditional, const Denoiser& unconditional,
              const TextEmbedding& y, const StyleCondition* style,
              const GuidanceParams& params, const NoiseSchedule& schedule,
              Rng& rng, std::size_t batch,
              std::vector<StepDiagnostics>* diagnostics) {
  params.Validate();
  if (!conditional.accepts_style() || unconditional.accepts_style()) {
    throw std::invalid_argument(
        "sample expects a conditional and an unconditional denoiser");
  }
  if (conditional.config().condition_dim != unconditional.config().condition_dim) {
    throw std::invalid_argument("denoiser condition widths differ");
  }
  const bool guided = style != nullptr && params.eta != 0.0;
  const int steps = schedule.steps();
  const Denoiser::PreparedCondition cond_c =
      guided ? conditional.PrepareCondition(y, style)
             : Denoiser::PreparedCondition{};
  const Denoiser::PreparedCondition cond_nc =
      unconditional.PrepareCondition(y, nullptr);
  Tensor x = DrawTerminal(batch, y.length(), params.tau, rng);
  if (diagnostics) diagnostics->clear();
  std::vector<RescaleDiagnostics> step_diag;
  for (int t = steps; t >= 1; --t) {
    Tensor eps_hat;
    if (guided) {
      Tensor eps_c = conditional.PredictNoise(x, t, steps, cond_c);
      Tensor eps_nc = unconditional.PredictNoise(x, t, steps, cond_nc);
      Tensor combined = CfgCombine(eps_c, eps_nc, params.eta);
      eps_hat = Rescale(combined, eps_c, params.gamma, &step_diag);
      if (diagnostics) diagnostics->push_back({t, step_diag.front()});
    } else {
      eps_hat = unconditional.PredictNoise(x, t, steps, cond_nc);
      if (diagnostics) {
        const double s = ExampleStd(eps_hat, 0);
        diagnostics->push_back({t, RescaleDiagnostics{s, s, 1.0}});
      }
    }
    x = ReverseStep(x, t, eps_hat, schedule, rng);
  }
  return x;
}

TrainLosses TrainStep(Denoiser& conditional, Denoiser& unconditional,
                      StyleBank& bank, std::span<const TrainExample> batch,
                      const NoiseSchedule& schedule, const AdamConfig& adam,
                      Rng& rng, const TrainStepOptions& options) {
  if (batch.empty()) throw std::invalid_argument("train step on an empty batch");
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  Graph g_cond(options.update_conditional);
  Graph g_uncond(options.update_unconditional);
  Var total_c;
  Var total_nc;
  for (const TrainExample& ex : batch) {
    const int t = static_cast<int>(rng.UniformInt(1, schedule.steps()));
    Tensor eps(ex.x0->shape());
    for (double& v : eps.values()) v = rng.Normal();

    StyleBank::Encoded style = bank.Encode(g_cond, *ex.reference);
    Var loss_c = ops::Scale(
        g_cond,
        DiffusionLoss(g_cond, conditional, *ex.x0, t, eps, ex.text,
                      style.condition, schedule),
        inv_batch);
    Var loss_nc = ops::Scale(
        g_uncond,
        DiffusionLoss(g_uncond, unconditional, *ex.x0, t, eps, ex.text, nullptr,
                      schedule),
        inv_batch);
    total_c = total_c ? ops::Add(g_cond, total_c, loss_c) : loss_c;
    total_nc = total_nc ? ops::Add(g_uncond, total_nc, loss_nc) : loss_nc;
  }
  TrainLosses losses{total_c->tensor[0], total_nc->tensor[0]};
  if (options.update_conditional) {
    g_cond.Backward(total_c);
    std::vector<Parameter*> params = conditional.parameters().All();
    for (Parameter* p : bank.parameters().All()) params.push_back(p);
    OptimizerStep(params, adam);
  }
  if (options.update_unconditional) {
    g_uncond.Backward(total_nc);
    OptimizerStep(unconditional.parameters().All(), adam);
  }
  return losses;
}

}  // namespace prosodiff
