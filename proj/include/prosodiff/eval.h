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

#ifndef PROSODIFF_EVAL_H_
#define PROSODIFF_EVAL_H_

#include <array>
#include <span>
#include <vector>

#include "prosodiff/corpus.h"

namespace prosodiff {

inline constexpr std::size_t kHistogramBins = 50;
inline constexpr double kHistogramSmoothing = 1e-9;

struct Histogram {
  std::vector<double> bin_edges;  // B + 1, strictly increasing
  std::vector<double> masses;     // B, sums to 1

  void Validate() const;
};

// `bins` equal-width bins over [lo, hi]. A degenerate range is widened by
// 0.5 on each side.
std::vector<double> UniformEdges(double lo, double hi, std::size_t bins);

// Values outside the edges are counted in the nearest end bin. Each bin gets
// `smoothing` extra mass before normalization.
Histogram MakeHistogram(std::span<const double> values,
                        std::span<const double> edges,
                        double smoothing = kHistogramSmoothing);

// Natural-log Jensen-Shannon divergence in [0, ln 2]. Throws if the edges
// differ.
double JsDivergence(const Histogram& p, const Histogram& q);

// Histograms on kHistogramBins bins spanning the reference range.
double JsDivergence(std::span<const double> generated,
                    std::span<const double> reference);

// Per-channel divergence between pooled phoneme values.
std::array<double, 3> PooledJs(std::span<const ProsodySequence> generated,
                               std::span<const ProsodySequence> reference);

// Per-channel divergence computed inside each group (style) on bins spanning
// the pooled reference range, then averaged over the groups. Every group in
// the reference must appear in the generated set and vice versa.
std::array<double, 3> GroupedJs(std::span<const ProsodySequence> generated,
                                std::span<const int> generated_groups,
                                std::span<const ProsodySequence> reference,
                                std::span<const int> reference_groups);

// 100 * population std / |mean|. Throws on an empty input or zero mean.
double CoefficientOfVariation(std::span<const double> values);

// Channel values on their linear scale: exp() of the log channels, energy
// as stored.
std::vector<double> LinearChannel(const ProsodySequence& x, std::size_t channel);

inline constexpr std::size_t kDescriptorSize = 21;
using ProsodyDescriptor = std::array<double, kDescriptorSize>;

// Per channel: mean, std, median, min, max, skewness, kurtosis (non-excess).
// Throws for L < 2 or a constant channel.
ProsodyDescriptor Descriptor(const ProsodySequence& x);

// Leave-one-out nearest-centroid accuracy on z-scored descriptors.
double ClusterSeparation(std::span<const ProsodyDescriptor> descriptors,
                         std::span<const int> labels);

}  // namespace prosodiff

#endif  // PROSODIFF_EVAL_H_
