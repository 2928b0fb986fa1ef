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

#ifndef PROSODIFF_PARAMETER_H_
#define PROSODIFF_PARAMETER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "prosodiff/autograd.h"
#include "prosodiff/rng.h"

namespace prosodiff {

struct Parameter {
  std::string name;
  Var var;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_counter = 0;

  Tensor& tensor() { return var->tensor; }
  const Tensor& tensor() const { return var->tensor; }
};

// Ordered collection of uniquely named parameters. Element addresses are
// stable for the lifetime of the set.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  // Weights drawn from U(-sqrt(1/fan_in), sqrt(1/fan_in)).
  Var AddWeight(const std::string& name, Shape shape, std::size_t fan_in,
                Rng& rng);
  Var AddZeros(const std::string& name, Shape shape);
  Var AddNormal(const std::string& name, Shape shape, double stddev, Rng& rng);

  Parameter& Get(const std::string& name);
  const Parameter& Get(const std::string& name) const;
  bool Contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t ScalarCount() const;
  std::vector<std::string> Names() const;
  std::vector<Parameter*> All();
  std::vector<const Parameter*> All() const;

  void ClearGrads();

 private:
  Var Insert(const std::string& name, Tensor tensor);

  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t> index_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

// One adaptive-moment update with bias correction over every parameter,
// then clears gradients. Throws std::logic_error if a parameter has no
// gradient.
void OptimizerStep(const std::vector<Parameter*>& params,
                   const AdamConfig& config);

}  // namespace prosodiff

#endif  // PROSODIFF_PARAMETER_H_
