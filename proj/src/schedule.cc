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

#include "prosodiff/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "prosodiff/format.h"

namespace prosodiff {

NoiseSchedule NoiseSchedule::Cosine(int steps, double offset,
                                    double max_beta) {
  if (steps < 2) {
    throw std::invalid_argument("cosine schedule needs at least 2 steps, got " +
                                std::to_string(steps));
  }
  auto f = [&](int t) {
    const double c = std::cos(((static_cast<double>(t) / steps + offset) /
                               (1.0 + offset)) *
                              std::numbers::pi / 2.0);
    return c * c;
  };
  NoiseSchedule s;
  const double f0 = f(0);
  double prev = 1.0;
  double accumulated = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double target = f(t) / f0;
    const double beta = std::min(1.0 - target / prev, max_beta);
    prev = target;
    accumulated *= 1.0 - beta;
    s.betas_.push_back(beta);
    s.alphas_.push_back(1.0 - beta);
    s.alpha_bars_.push_back(accumulated);
  }
  return s;
}

std::size_t NoiseSchedule::Index(int t) const {
  if (t < 1 || t > steps()) {
    throw std::out_of_range("diffusion step " + std::to_string(t) +
                            " outside 1.." + std::to_string(steps()));
  }
  return static_cast<std::size_t>(t - 1);
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  return alpha_bars_[Index(t)];
}

double NoiseSchedule::posterior_variance(int t) const {
  return (1.0 - alpha_bar(t - 1)) / (1.0 - alpha_bar(t)) * beta(t);
}

std::string NoiseSchedule::ToCsv() const {
  std::string out = "t,beta,alpha,alpha_bar\n";
  for (int t = 1; t <= steps(); ++t) {
    out += std::to_string(t) + "," + FormatDouble(beta(t)) + "," +
           FormatDouble(alpha(t)) + "," + FormatDouble(alpha_bar(t)) + "\n";
  }
  return out;
}

Tensor ForwardDiffuse(const Tensor& x0, int t, const Tensor& eps,
                      const NoiseSchedule& schedule) {
  RequireSameShape(x0, eps, "forward_diffuse");
  if (t < 1 || t > schedule.steps()) {
    throw std::out_of_range("forward_diffuse: step " + std::to_string(t) +
                            " outside 1.." + std::to_string(schedule.steps()));
  }
  const double ab = schedule.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double noise = std::sqrt(1.0 - ab);
  Tensor out(x0.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = signal * x0[i] + noise * eps[i];
  }
  return out;
}

}  // namespace prosodiff
