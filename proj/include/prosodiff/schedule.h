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

#ifndef PROSODIFF_SCHEDULE_H_
#define PROSODIFF_SCHEDULE_H_

#include <span>
#include <string>
#include <vector>

#include "prosodiff/tensor.h"

namespace prosodiff {

// Variance table of the forward noising chain. Steps are 1-based:
// t = 1..T; t = 0 denotes clean data.
class NoiseSchedule {
 public:
  // Offset-cosine construction: alpha_bar(t) = f(t) / f(0) with
  // f(t) = cos^2(((t / T + s) / (1 + s)) * pi / 2); betas are clipped at
  // max_beta and alpha_bar is re-accumulated from the clipped betas.
  static NoiseSchedule Cosine(int steps, double offset = 0.008,
                              double max_beta = 0.999);

  int steps() const { return static_cast<int>(betas_.size()); }

  double beta(int t) const { return betas_[Index(t)]; }
  double alpha(int t) const { return alphas_[Index(t)]; }
  // alpha_bar(0) is 1.
  double alpha_bar(int t) const;

  std::span<const double> betas() const { return betas_; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> alpha_bars() const { return alpha_bars_; }

  // Posterior variance of q(x_{t-1} | x_t, x_0).
  double posterior_variance(int t) const;

  // CSV with header "t,beta,alpha,alpha_bar".
  std::string ToCsv() const;

 private:
  std::size_t Index(int t) const;

  std::vector<double> betas_;
  std::vector<double> alphas_;
  std::vector<double> alpha_bars_;
};

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps.
Tensor ForwardDiffuse(const Tensor& x0, int t, const Tensor& eps,
                      const NoiseSchedule& schedule);

}  // namespace prosodiff

#endif  // PROSODIFF_SCHEDULE_H_
