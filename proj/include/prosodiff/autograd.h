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

#ifndef PROSODIFF_AUTOGRAD_H_
#define PROSODIFF_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <vector>

#include "prosodiff/tensor.h"

namespace prosodiff {

struct Node {
  Tensor tensor;
  bool requires_grad = false;
};

using Var = std::shared_ptr<Node>;

Var MakeVar(Tensor tensor, bool requires_grad = false);

// Dynamically recorded reverse-mode tape. Operations on Vars append a
// backward closure while the graph is recording; Backward() replays them in
// reverse and accumulates gradients into every reachable node that requires
// them. A graph can be replayed once.
class Graph {
 public:
  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const { return record_; }

  // True if recording and any input requires a gradient.
  bool Tracks(std::initializer_list<const Var*> inputs) const;

  void Record(std::function<void()> backward);

  // loss must hold a single element.
  void Backward(const Var& loss);

  std::size_t tape_size() const { return tape_.size(); }

 private:
  std::vector<std::function<void()>> tape_;
  bool record_;
  bool consumed_ = false;
};

namespace ops {

Var Constant(Tensor tensor);
// Value copy that blocks gradient flow.
Var Detach(const Var& x);

Var Add(Graph& g, const Var& a, const Var& b);
Var Sub(Graph& g, const Var& a, const Var& b);
Var Mul(Graph& g, const Var& a, const Var& b);
Var Scale(Graph& g, const Var& x, double factor);

// x: [B, C, L]; v: [B, C] or [C]. Adds v at every position.
Var AddOverPositions(Graph& g, const Var& x, const Var& v);
// x: [B, C, L]; y: [1, C, L], added to every batch element.
Var AddAcrossBatch(Graph& g, const Var& x, const Var& y);

Var Tanh(Graph& g, const Var& x);
Var Sigmoid(Graph& g, const Var& x);
Var Relu(Graph& g, const Var& x);
Var Silu(Graph& g, const Var& x);
// tanh(a) * sigmoid(b), elementwise.
Var GatedActivation(Graph& g, const Var& a, const Var& b);

// Same-length 1-D convolution with symmetric zero padding.
// x: [B, Cin, L], w: [Cout, Cin, K] (K odd), bias: [Cout] or null.
Var Conv1d(Graph& g, const Var& x, const Var& w, const Var& bias,
           int dilation);

// x: [M, In], w: [Out, In], bias: [Out] or null -> [M, Out].
Var Linear(Graph& g, const Var& x, const Var& w, const Var& bias);
// a: [M, K], b: [K, N] -> [M, N].
Var MatMul(Graph& g, const Var& a, const Var& b);
// a: [M, K], b: [N, K] -> a * b^T, [M, N].
Var MatMulTransposed(Graph& g, const Var& a, const Var& b);

// Channel slice [begin, begin + count) of a [B, C, L] tensor.
Var SliceChannels(Graph& g, const Var& x, std::size_t begin,
                  std::size_t count);
// Column slice [begin, begin + count) of a [M, N] tensor.
Var SliceColumns(Graph& g, const Var& x, std::size_t begin,
                 std::size_t count);
// [L, D] -> [1, D, L].
Var TransposeToSequence(Graph& g, const Var& x);
Var Reshape(Graph& g, const Var& x, Shape shape);

// [B, C, L] -> [B, C].
Var MeanOverPositions(Graph& g, const Var& x);
// Softmax over the last axis.
Var Softmax(Graph& g, const Var& x);

// Scalar reductions, shape [1].
Var Sum(Graph& g, const Var& x);
Var MeanSquaredError(Graph& g, const Var& prediction, const Var& target);

}  // namespace ops
}  // namespace prosodiff

#endif  // PROSODIFF_AUTOGRAD_H_
