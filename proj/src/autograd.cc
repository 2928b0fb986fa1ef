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

#include "prosodiff/autograd.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace prosodiff {

Var MakeVar(Tensor tensor, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->tensor = std::move(tensor);
  node->requires_grad = requires_grad;
  return node;
}

bool Graph::Tracks(std::initializer_list<const Var*> inputs) const {
  if (!record_) return false;
  for (const Var* v : inputs) {
    if (*v && (*v)->requires_grad) return true;
  }
  return false;
}

void Graph::Record(std::function<void()> backward) {
  if (consumed_) {
    throw std::logic_error("graph already replayed; run a new forward pass");
  }
  tape_.push_back(std::move(backward));
}

void Graph::Backward(const Var& loss) {
  if (consumed_) {
    throw std::logic_error(
        "backward called twice on one graph; re-run the forward pass");
  }
  if (!loss || loss->tensor.size() != 1) {
    throw std::invalid_argument("backward requires a scalar loss");
  }
  consumed_ = true;
  if (!loss->requires_grad) {
    tape_.clear();
    return;
  }
  loss->tensor.grad()[0] += 1.0;
  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) (*it)();
  tape_.clear();
}

namespace ops {
namespace {

void Require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

template <typename MakeMessage>
void Require(bool ok, MakeMessage&& make_message) {
  if (!ok) throw std::invalid_argument(make_message());
}

void RequireRank(const Var& v, std::size_t rank, const char* op) {
  Require(v && v->tensor.rank() == rank, [&] {
    return std::string(op) + ": expected rank " + std::to_string(rank) +
           " input, got " + (v ? ShapeToString(v->tensor.shape()) : "null");
  });
}

template <typename Forward, typename Derivative>
Var Unary(Graph& g, const Var& x, Forward f, Derivative df) {
  const Tensor& xt = x->tensor;
  Var out = MakeVar(Tensor(xt.shape()), g.Tracks({&x}));
  auto ov = out->tensor.values();
  auto xv = xt.values();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = f(xv[i]);
  if (out->requires_grad) {
    g.Record([x, out, df] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      auto xv = x->tensor.values();
      auto yv = out->tensor.values();
      for (std::size_t i = 0; i < go.size(); ++i) {
        gx[i] += go[i] * df(xv[i], yv[i]);
      }
    });
  }
  return out;
}

double SigmoidValue(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Var Constant(Tensor tensor) { return MakeVar(std::move(tensor), false); }

Var Detach(const Var& x) { return MakeVar(x->tensor.Reshaped(x->tensor.shape()), false); }

Var Add(Graph& g, const Var& a, const Var& b) {
  RequireSameShape(a->tensor, b->tensor, "add");
  Var out = MakeVar(Tensor(a->tensor.shape()), g.Tracks({&a, &b}));
  auto ov = out->tensor.values();
  auto av = a->tensor.values();
  auto bv = b->tensor.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
  if (out->requires_grad) {
    g.Record([a, b, out] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      for (const Var* v : {&a, &b}) {
        if (!(*v)->requires_grad) continue;
        auto gv = (*v)->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gv[i] += go[i];
      }
    });
  }
  return out;
}

Var Sub(Graph& g, const Var& a, const Var& b) {
  RequireSameShape(a->tensor, b->tensor, "sub");
  Var out = MakeVar(Tensor(a->tensor.shape()), g.Tracks({&a, &b}));
  auto ov = out->tensor.values();
  auto av = a->tensor.values();
  auto bv = b->tensor.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
  if (out->requires_grad) {
    g.Record([a, b, out] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      if (a->requires_grad) {
        auto ga = a->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
      }
      if (b->requires_grad) {
        auto gb = b->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
      }
    });
  }
  return out;
}

Var Mul(Graph& g, const Var& a, const Var& b) {
  RequireSameShape(a->tensor, b->tensor, "mul");
  Var out = MakeVar(Tensor(a->tensor.shape()), g.Tracks({&a, &b}));
  auto ov = out->tensor.values();
  auto av = a->tensor.values();
  auto bv = b->tensor.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  if (out->requires_grad) {
    g.Record([a, b, out] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto av = a->tensor.values();
      auto bv = b->tensor.values();
      if (a->requires_grad) {
        auto ga = a->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv[i];
      }
      if (b->requires_grad) {
        auto gb = b->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
      }
    });
  }
  return out;
}

Var Scale(Graph& g, const Var& x, double factor) {
  return Unary(
      g, x, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Var AddOverPositions(Graph& g, const Var& x, const Var& v) {
  RequireRank(x, 3, "add_over_positions");
  const std::size_t batch = x->tensor.dim(0);
  const std::size_t channels = x->tensor.dim(1);
  const std::size_t length = x->tensor.dim(2);
  const bool per_batch = v->tensor.rank() == 2;
  if (per_batch) {
    Require(v->tensor.dim(0) == batch && v->tensor.dim(1) == channels, [&] {
      return "add_over_positions: vector shape " +
             ShapeToString(v->tensor.shape()) + " vs input " +
             ShapeToString(x->tensor.shape());
    });
  } else {
    Require(v->tensor.rank() == 1 && v->tensor.dim(0) == channels, [&] {
      return "add_over_positions: vector shape " +
             ShapeToString(v->tensor.shape()) + " vs input " +
             ShapeToString(x->tensor.shape());
    });
  }
  Var out = MakeVar(Tensor(x->tensor.shape()), g.Tracks({&x, &v}));
  const double* xv = x->tensor.data();
  const double* vv = v->tensor.data();
  double* ov = out->tensor.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double add = vv[per_batch ? b * channels + c : c];
      const std::size_t row = (b * channels + c) * length;
      for (std::size_t l = 0; l < length; ++l) ov[row + l] = xv[row + l] + add;
    }
  }
  if (out->requires_grad) {
    g.Record([x, v, out, batch, channels, length, per_batch] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      if (x->requires_grad) {
        auto gx = x->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
      }
      if (v->requires_grad) {
        auto gv = v->tensor.grad();
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t row = (b * channels + c) * length;
            double s = 0.0;
            for (std::size_t l = 0; l < length; ++l) s += go[row + l];
            gv[per_batch ? b * channels + c : c] += s;
          }
        }
      }
    });
  }
  return out;
}

Var AddAcrossBatch(Graph& g, const Var& x, const Var& y) {
  RequireRank(x, 3, "add_across_batch");
  RequireRank(y, 3, "add_across_batch");
  Require(y->tensor.dim(0) == 1 && y->tensor.dim(1) == x->tensor.dim(1) &&
              y->tensor.dim(2) == x->tensor.dim(2), [&] {
    return "add_across_batch: shape " + ShapeToString(y->tensor.shape()) +
           " vs input " + ShapeToString(x->tensor.shape());
  });
  const std::size_t batch = x->tensor.dim(0);
  const std::size_t row = y->tensor.size();
  Var out = MakeVar(Tensor(x->tensor.shape()), g.Tracks({&x, &y}));
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xv = x->tensor.data() + b * row;
    const double* yv = y->tensor.data();
    double* ov = out->tensor.data() + b * row;
    for (std::size_t i = 0; i < row; ++i) ov[i] = xv[i] + yv[i];
  }
  if (out->requires_grad) {
    g.Record([x, y, out, batch, row] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      if (x->requires_grad) {
        auto gx = x->tensor.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
      }
      if (y->requires_grad) {
        auto gy = y->tensor.grad();
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t i = 0; i < row; ++i) gy[i] += go[b * row + i];
        }
      }
    });
  }
  return out;
}

Var Tanh(Graph& g, const Var& x) {
  return Unary(
      g, x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(Graph& g, const Var& x) {
  return Unary(
      g, x, [](double v) { return SigmoidValue(v); },
      [](double, double y) { return y * (1.0 - y); });
}

Var Relu(Graph& g, const Var& x) {
  return Unary(
      g, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var Silu(Graph& g, const Var& x) {
  return Unary(
      g, x, [](double v) { return v * SigmoidValue(v); },
      [](double v, double) {
        const double s = SigmoidValue(v);
        return s * (1.0 + v * (1.0 - s));
      });
}

Var GatedActivation(Graph& g, const Var& a, const Var& b) {
  RequireSameShape(a->tensor, b->tensor, "gated_activation");
  Var out = MakeVar(Tensor(a->tensor.shape()), g.Tracks({&a, &b}));
  const std::size_t n = out->tensor.size();
  // Cache tanh(a) and sigmoid(b) for the backward pass.
  auto cache = std::make_shared<std::vector<double>>(
      out->requires_grad ? 2 * n : 0);
  auto ov = out->tensor.values();
  auto av = a->tensor.values();
  auto bv = b->tensor.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double ta = std::tanh(av[i]);
    const double sb = SigmoidValue(bv[i]);
    ov[i] = ta * sb;
    if (!cache->empty()) {
      (*cache)[i] = ta;
      (*cache)[n + i] = sb;
    }
  }
  if (out->requires_grad) {
    g.Record([a, b, out, cache, n] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      const double* ta = cache->data();
      const double* sb = cache->data() + n;
      if (a->requires_grad) {
        auto ga = a->tensor.grad();
        for (std::size_t i = 0; i < n; ++i) {
          ga[i] += go[i] * (1.0 - ta[i] * ta[i]) * sb[i];
        }
      }
      if (b->requires_grad) {
        auto gb = b->tensor.grad();
        for (std::size_t i = 0; i < n; ++i) {
          gb[i] += go[i] * ta[i] * sb[i] * (1.0 - sb[i]);
        }
      }
    });
  }
  return out;
}

Var Conv1d(Graph& g, const Var& x, const Var& w, const Var& bias,
           int dilation) {
  RequireRank(x, 3, "conv1d");
  RequireRank(w, 3, "conv1d weights");
  Require(dilation >= 1, "conv1d: dilation must be >= 1");
  const std::size_t batch = x->tensor.dim(0);
  const std::size_t in_ch = x->tensor.dim(1);
  const std::size_t length = x->tensor.dim(2);
  const std::size_t out_ch = w->tensor.dim(0);
  const std::size_t kernel = w->tensor.dim(2);
  Require(kernel % 2 == 1, "conv1d: kernel size must be odd");
  Require(w->tensor.dim(1) == in_ch, [&] {
    return "conv1d: weight shape " + ShapeToString(w->tensor.shape()) +
           " does not match input " + ShapeToString(x->tensor.shape());
  });
  if (bias) {
    Require(bias->tensor.rank() == 1 && bias->tensor.dim(0) == out_ch, [&] {
      return "conv1d: bias shape " + ShapeToString(bias->tensor.shape());
    });
  }
  const auto half = static_cast<std::ptrdiff_t>(kernel / 2);
  const auto len = static_cast<std::ptrdiff_t>(length);
  const auto dil = static_cast<std::ptrdiff_t>(dilation);

  Var out = MakeVar(Tensor({batch, out_ch, length}), g.Tracks({&x, &w, &bias}));
  const double* xv = x->tensor.data();
  const double* wv = w->tensor.data();
  double* ov = out->tensor.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      double* orow = ov + (b * out_ch + o) * length;
      const double bo = bias ? bias->tensor[o] : 0.0;
      for (std::size_t l = 0; l < length; ++l) orow[l] = bo;
      for (std::size_t i = 0; i < in_ch; ++i) {
        const double* xrow = xv + (b * in_ch + i) * length;
        const double* wrow = wv + (o * in_ch + i) * kernel;
        for (std::size_t k = 0; k < kernel; ++k) {
          const std::ptrdiff_t off = (static_cast<std::ptrdiff_t>(k) - half) * dil;
          const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
          const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - off);
          const double wk = wrow[k];
          for (std::ptrdiff_t l = lo; l < hi; ++l) orow[l] += wk * xrow[l + off];
        }
      }
    }
  }
  if (out->requires_grad) {
    g.Record([x, w, bias, out, batch, in_ch, out_ch, length, kernel, half,
              len, dil] {
      if (!out->tensor.has_grad()) return;
      const double* go = out->tensor.grad().data();
      const double* xv = x->tensor.data();
      const double* wv = w->tensor.data();
      double* gx = x->requires_grad ? x->tensor.grad().data() : nullptr;
      double* gw = w->requires_grad ? w->tensor.grad().data() : nullptr;
      double* gb = bias && bias->requires_grad ? bias->tensor.grad().data()
                                               : nullptr;
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < out_ch; ++o) {
          const double* grow = go + (b * out_ch + o) * length;
          if (gb) {
            double s = 0.0;
            for (std::size_t l = 0; l < length; ++l) s += grow[l];
            gb[o] += s;
          }
          for (std::size_t i = 0; i < in_ch; ++i) {
            const std::size_t xoff = (b * in_ch + i) * length;
            const std::size_t woff = (o * in_ch + i) * kernel;
            for (std::size_t k = 0; k < kernel; ++k) {
              const std::ptrdiff_t off =
                  (static_cast<std::ptrdiff_t>(k) - half) * dil;
              const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
              const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len - off);
              if (gw) {
                double s = 0.0;
                for (std::ptrdiff_t l = lo; l < hi; ++l) {
                  s += grow[l] * xv[xoff + l + off];
                }
                gw[woff + k] += s;
              }
              if (gx) {
                const double wk = wv[woff + k];
                double* gxrow = gx + xoff;
                for (std::ptrdiff_t l = lo; l < hi; ++l) {
                  gxrow[l + off] += wk * grow[l];
                }
              }
            }
          }
        }
      }
    });
  }
  return out;
}

Var Linear(Graph& g, const Var& x, const Var& w, const Var& bias) {
  RequireRank(x, 2, "linear");
  RequireRank(w, 2, "linear weights");
  const std::size_t rows = x->tensor.dim(0);
  const std::size_t in = x->tensor.dim(1);
  const std::size_t outs = w->tensor.dim(0);
  Require(w->tensor.dim(1) == in, [&] {
    return "linear: weight shape " + ShapeToString(w->tensor.shape()) +
           " does not match input " + ShapeToString(x->tensor.shape());
  });
  if (bias) {
    Require(bias->tensor.rank() == 1 && bias->tensor.dim(0) == outs, [&] {
      return "linear: bias shape " + ShapeToString(bias->tensor.shape());
    });
  }
  Var out = MakeVar(Tensor({rows, outs}), g.Tracks({&x, &w, &bias}));
  const double* xv = x->tensor.data();
  const double* wv = w->tensor.data();
  double* ov = out->tensor.data();
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t o = 0; o < outs; ++o) {
      double s = bias ? bias->tensor[o] : 0.0;
      for (std::size_t i = 0; i < in; ++i) s += xv[m * in + i] * wv[o * in + i];
      ov[m * outs + o] = s;
    }
  }
  if (out->requires_grad) {
    g.Record([x, w, bias, out, rows, in, outs] {
      if (!out->tensor.has_grad()) return;
      const double* go = out->tensor.grad().data();
      const double* xv = x->tensor.data();
      const double* wv = w->tensor.data();
      double* gx = x->requires_grad ? x->tensor.grad().data() : nullptr;
      double* gw = w->requires_grad ? w->tensor.grad().data() : nullptr;
      double* gb = bias && bias->requires_grad ? bias->tensor.grad().data()
                                               : nullptr;
      for (std::size_t m = 0; m < rows; ++m) {
        for (std::size_t o = 0; o < outs; ++o) {
          const double d = go[m * outs + o];
          if (gb) gb[o] += d;
          if (gx) {
            for (std::size_t i = 0; i < in; ++i) gx[m * in + i] += d * wv[o * in + i];
          }
          if (gw) {
            for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += d * xv[m * in + i];
          }
        }
      }
    });
  }
  return out;
}

Var MatMul(Graph& g, const Var& a, const Var& b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  const std::size_t m = a->tensor.dim(0);
  const std::size_t k = a->tensor.dim(1);
  const std::size_t n = b->tensor.dim(1);
  Require(b->tensor.dim(0) == k, [&] {
    return "matmul: inner dimensions differ " +
           ShapeToString(a->tensor.shape()) + " x " +
           ShapeToString(b->tensor.shape());
  });
  Var out = MakeVar(Tensor({m, n}), g.Tracks({&a, &b}));
  const double* av = a->tensor.data();
  const double* bv = b->tensor.data();
  double* ov = out->tensor.data();
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t p = 0; p < k; ++p) {
      const double arp = av[r * k + p];
      for (std::size_t c = 0; c < n; ++c) ov[r * n + c] += arp * bv[p * n + c];
    }
  }
  if (out->requires_grad) {
    g.Record([a, b, out, m, k, n] {
      if (!out->tensor.has_grad()) return;
      const double* go = out->tensor.grad().data();
      const double* av = a->tensor.data();
      const double* bv = b->tensor.data();
      if (a->requires_grad) {
        double* ga = a->tensor.grad().data();
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t p = 0; p < k; ++p) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += go[r * n + c] * bv[p * n + c];
            ga[r * k + p] += s;
          }
        }
      }
      if (b->requires_grad) {
        double* gb = b->tensor.grad().data();
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t p = 0; p < k; ++p) {
            const double arp = av[r * k + p];
            for (std::size_t c = 0; c < n; ++c) gb[p * n + c] += arp * go[r * n + c];
          }
        }
      }
    });
  }
  return out;
}

Var MatMulTransposed(Graph& g, const Var& a, const Var& b) {
  RequireRank(a, 2, "matmul_transposed");
  RequireRank(b, 2, "matmul_transposed");
  Require(a->tensor.dim(1) == b->tensor.dim(1), [&] {
    return "matmul_transposed: inner dimensions differ " +
           ShapeToString(a->tensor.shape()) + " x " +
           ShapeToString(b->tensor.shape()) + "^T";
  });
  return Linear(g, a, b, nullptr);
}

Var SliceChannels(Graph& g, const Var& x, std::size_t begin,
                  std::size_t count) {
  RequireRank(x, 3, "slice_channels");
  const std::size_t batch = x->tensor.dim(0);
  const std::size_t channels = x->tensor.dim(1);
  const std::size_t length = x->tensor.dim(2);
  Require(begin + count <= channels && count > 0,
          "slice_channels: range out of bounds");
  Var out = MakeVar(Tensor({batch, count, length}), g.Tracks({&x}));
  for (std::size_t b = 0; b < batch; ++b) {
    const double* src = x->tensor.data() + (b * channels + begin) * length;
    std::copy(src, src + count * length,
              out->tensor.data() + b * count * length);
  }
  if (out->requires_grad) {
    g.Record([x, out, batch, channels, length, begin, count] {
      if (!out->tensor.has_grad()) return;
      const double* go = out->tensor.grad().data();
      double* gx = x->tensor.grad().data();
      for (std::size_t b = 0; b < batch; ++b) {
        double* dst = gx + (b * channels + begin) * length;
        const double* src = go + b * count * length;
        for (std::size_t i = 0; i < count * length; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

Var SliceColumns(Graph& g, const Var& x, std::size_t begin,
                 std::size_t count) {
  RequireRank(x, 2, "slice_columns");
  const std::size_t rows = x->tensor.dim(0);
  const std::size_t cols = x->tensor.dim(1);
  Require(begin + count <= cols && count > 0,
          "slice_columns: range out of bounds");
  Var out = MakeVar(Tensor({rows, count}), g.Tracks({&x}));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) {
      out->tensor[r * count + c] = x->tensor[r * cols + begin + c];
    }
  }
  if (out->requires_grad) {
    g.Record([x, out, rows, cols, begin, count] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < count; ++c) {
          gx[r * cols + begin + c] += go[r * count + c];
        }
      }
    });
  }
  return out;
}

Var TransposeToSequence(Graph& g, const Var& x) {
  RequireRank(x, 2, "transpose_to_sequence");
  const std::size_t length = x->tensor.dim(0);
  const std::size_t dim = x->tensor.dim(1);
  Var out = MakeVar(Tensor({1, dim, length}), g.Tracks({&x}));
  for (std::size_t l = 0; l < length; ++l) {
    for (std::size_t d = 0; d < dim; ++d) {
      out->tensor[d * length + l] = x->tensor[l * dim + d];
    }
  }
  if (out->requires_grad) {
    g.Record([x, out, length, dim] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      for (std::size_t l = 0; l < length; ++l) {
        for (std::size_t d = 0; d < dim; ++d) {
          gx[l * dim + d] += go[d * length + l];
        }
      }
    });
  }
  return out;
}

Var Reshape(Graph& g, const Var& x, Shape shape) {
  Var out = MakeVar(x->tensor.Reshaped(std::move(shape)), g.Tracks({&x}));
  if (out->requires_grad) {
    g.Record([x, out] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
    });
  }
  return out;
}

Var MeanOverPositions(Graph& g, const Var& x) {
  RequireRank(x, 3, "mean_over_positions");
  const std::size_t batch = x->tensor.dim(0);
  const std::size_t channels = x->tensor.dim(1);
  const std::size_t length = x->tensor.dim(2);
  Require(length > 0, "mean_over_positions: empty sequence");
  Var out = MakeVar(Tensor({batch, channels}), g.Tracks({&x}));
  const double inv = 1.0 / static_cast<double>(length);
  for (std::size_t r = 0; r < batch * channels; ++r) {
    double s = 0.0;
    for (std::size_t l = 0; l < length; ++l) s += x->tensor[r * length + l];
    out->tensor[r] = s * inv;
  }
  if (out->requires_grad) {
    g.Record([x, out, batch, channels, length, inv] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      for (std::size_t r = 0; r < batch * channels; ++r) {
        for (std::size_t l = 0; l < length; ++l) gx[r * length + l] += go[r] * inv;
      }
    });
  }
  return out;
}

Var Softmax(Graph& g, const Var& x) {
  Require(x && x->tensor.rank() >= 1, "softmax: empty input");
  const std::size_t n = x->tensor.shape().back();
  const std::size_t rows = x->tensor.size() / n;
  Var out = MakeVar(Tensor(x->tensor.shape()), g.Tracks({&x}));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x->tensor.data() + r * n;
    double* yr = out->tensor.data() + r * n;
    const double peak = *std::max_element(xr, xr + n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      yr[i] = std::exp(xr[i] - peak);
      z += yr[i];
    }
    for (std::size_t i = 0; i < n; ++i) yr[i] /= z;
  }
  if (out->requires_grad) {
    g.Record([x, out, rows, n] {
      if (!out->tensor.has_grad()) return;
      auto go = out->tensor.grad();
      auto gx = x->tensor.grad();
      auto y = out->tensor.values();
      for (std::size_t r = 0; r < rows; ++r) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += go[r * n + i] * y[r * n + i];
        for (std::size_t i = 0; i < n; ++i) {
          gx[r * n + i] += y[r * n + i] * (go[r * n + i] - dot);
        }
      }
    });
  }
  return out;
}

Var Sum(Graph& g, const Var& x) {
  Var out = MakeVar(Tensor({1}), g.Tracks({&x}));
  double s = 0.0;
  for (double v : x->tensor.values()) s += v;
  out->tensor[0] = s;
  if (out->requires_grad) {
    g.Record([x, out] {
      if (!out->tensor.has_grad()) return;
      const double go = out->tensor.grad()[0];
      for (double& v : x->tensor.grad()) v += go;
    });
  }
  return out;
}

Var MeanSquaredError(Graph& g, const Var& prediction, const Var& target) {
  RequireSameShape(prediction->tensor, target->tensor, "mean_squared_error");
  const std::size_t n = prediction->tensor.size();
  Require(n > 0, "mean_squared_error: empty input");
  Var out = MakeVar(Tensor({1}), g.Tracks({&prediction, &target}));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = prediction->tensor[i] - target->tensor[i];
    s += d * d;
  }
  out->tensor[0] = s / static_cast<double>(n);
  if (out->requires_grad) {
    g.Record([prediction, target, out, n] {
      if (!out->tensor.has_grad()) return;
      const double scale = 2.0 * out->tensor.grad()[0] / static_cast<double>(n);
      for (const Var* v : {&prediction, &target}) {
        if (!(*v)->requires_grad) continue;
        const double sign = v == &prediction ? 1.0 : -1.0;
        auto gv = (*v)->tensor.grad();
        for (std::size_t i = 0; i < n; ++i) {
          gv[i] += sign * scale * (prediction->tensor[i] - target->tensor[i]);
        }
      }
    });
  }
  return out;
}

}  // namespace ops
}  // namespace prosodiff
