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

#include "prosodiff/parameter.h"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace prosodiff {

Var ParameterSet::Insert(const std::string& name, Tensor tensor) {
  if (index_.count(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->first_moment.assign(tensor.size(), 0.0);
  p->second_moment.assign(tensor.size(), 0.0);
  p->var = MakeVar(std::move(tensor), true);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return params_.back()->var;
}

Var ParameterSet::AddWeight(const std::string& name, Shape shape,
                            std::size_t fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (double& v : t.values()) v = rng.Uniform(-bound, bound);
  return Insert(name, std::move(t));
}

Var ParameterSet::AddZeros(const std::string& name, Shape shape) {
  return Insert(name, Tensor(std::move(shape)));
}

Var ParameterSet::AddNormal(const std::string& name, Shape shape,
                            double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.Normal(0.0, stddev);
  return Insert(name, std::move(t));
}

Parameter& ParameterSet::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter " + name);
  return *params_[it->second];
}

const Parameter& ParameterSet::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter " + name);
  return *params_[it->second];
}

bool ParameterSet::Contains(const std::string& name) const {
  return index_.count(name) > 0;
}

std::size_t ParameterSet::ScalarCount() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->tensor().size();
  return n;
}

std::vector<std::string> ParameterSet::Names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& p : params_) names.push_back(p->name);
  return names;
}

std::vector<Parameter*> ParameterSet::All() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterSet::All() const {
  std::vector<const Parameter*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

void ParameterSet::ClearGrads() {
  for (auto& p : params_) p->tensor().ClearGrad();
}

void OptimizerStep(const std::vector<Parameter*>& params,
                   const AdamConfig& config) {
  for (const Parameter* p : params) {
    if (!p->tensor().has_grad()) {
      throw std::logic_error("optimizer step: parameter " + p->name +
                             " has no gradient");
    }
  }
  for (Parameter* p : params) {
    p->step_counter += 1;
    const double t = static_cast<double>(p->step_counter);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    auto values = p->tensor().values();
    auto grad = p->tensor().grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double gi = grad[i];
      double& m = p->first_moment[i];
      double& v = p->second_moment[i];
      m = config.beta1 * m + (1.0 - config.beta1) * gi;
      v = config.beta2 * v + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
    p->tensor().ClearGrad();
  }
}

}  // namespace prosodiff
