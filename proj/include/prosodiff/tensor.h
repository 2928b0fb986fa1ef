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

#ifndef PROSODIFF_TENSOR_H_
#define PROSODIFF_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace prosodiff {

using Shape = std::vector<std::size_t>;

std::size_t ShapeSize(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles with an optional gradient buffer of the
// same length. Sequence tensors use the [batch, channels, length] layout.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double value) { return Tensor({1}, {value}); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Element access for rank-3 [B, C, L] tensors.
  double& at(std::size_t b, std::size_t c, std::size_t l) {
    return values_[(b * shape_[1] + c) * shape_[2] + l];
  }
  double at(std::size_t b, std::size_t c, std::size_t l) const {
    return values_[(b * shape_[1] + c) * shape_[2] + l];
  }

  bool has_grad() const { return has_grad_; }
  // Allocates a zero gradient on first use.
  std::span<double> grad();
  std::span<const double> grad() const { return grad_; }
  void ClearGrad();

  // Same values under a new shape of equal element count.
  Tensor Reshaped(Shape shape) const;

 private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
  bool has_grad_ = false;
};

// Throws std::invalid_argument naming `what` when shapes differ.
void RequireSameShape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace prosodiff

#endif  // PROSODIFF_TENSOR_H_
