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

#include "prosodiff/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace prosodiff {
namespace {

double KlTerm(double p, double m) { return p > 0.0 ? p * std::log(p / m) : 0.0; }

std::vector<double> Gather(std::span<const ProsodySequence> seqs,
                           std::size_t channel) {
  std::vector<double> out;
  for (const ProsodySequence& s : seqs) {
    for (std::size_t l = 0; l < s.length(); ++l) out.push_back(s.at(channel, l));
  }
  return out;
}

std::vector<double> ChannelEdges(std::span<const double> reference) {
  if (reference.empty()) throw std::invalid_argument("empty reference values");
  const auto [lo, hi] = std::minmax_element(reference.begin(), reference.end());
  return UniformEdges(*lo, *hi, kHistogramBins);
}

}  // namespace

void Histogram::Validate() const {
  if (bin_edges.size() != masses.size() + 1 || masses.empty()) {
    throw std::invalid_argument("histogram needs B >= 1 masses and B + 1 edges");
  }
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
    if (!(bin_edges[i] < bin_edges[i + 1])) {
      throw std::invalid_argument("histogram edges must be strictly increasing");
    }
  }
  double sum = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("histogram masses must be >= 0");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("histogram masses must sum to 1");
  }
}

std::vector<double> UniformEdges(double lo, double hi, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw std::invalid_argument("histogram range must be finite with lo <= hi");
  }
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + width * static_cast<double>(i);
  }
  edges.back() = hi;
  return edges;
}

Histogram MakeHistogram(std::span<const double> values,
                        std::span<const double> edges, double smoothing) {
  if (edges.size() < 2) throw std::invalid_argument("histogram needs >= 2 edges");
  if (!(smoothing >= 0.0)) throw std::invalid_argument("smoothing must be >= 0");
  const std::size_t bins = edges.size() - 1;
  Histogram h;
  h.bin_edges.assign(edges.begin(), edges.end());
  h.masses.assign(bins, smoothing);
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite histogram value");
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t bin = it == edges.begin()
                          ? 0
                          : static_cast<std::size_t>(it - edges.begin()) - 1;
    h.masses[std::min(bin, bins - 1)] += 1.0;
  }
  double total = 0.0;
  for (double m : h.masses) total += m;
  if (!(total > 0.0)) {
    throw std::invalid_argument("histogram of no values without smoothing");
  }
  for (double& m : h.masses) m /= total;
  h.Validate();
  return h;
}

double JsDivergence(const Histogram& p, const Histogram& q) {
  p.Validate();
  q.Validate();
  if (p.bin_edges != q.bin_edges) {
    throw std::invalid_argument("js divergence needs identical bin edges");
  }
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t i = 0; i < p.masses.size(); ++i) {
    const double m = 0.5 * (p.masses[i] + q.masses[i]);
    kl_p += KlTerm(p.masses[i], m);
    kl_q += KlTerm(q.masses[i], m);
  }
  return std::clamp(0.5 * kl_p + 0.5 * kl_q, 0.0, std::log(2.0));
}

double JsDivergence(std::span<const double> generated,
                    std::span<const double> reference) {
  const std::vector<double> edges = ChannelEdges(reference);
  return JsDivergence(MakeHistogram(generated, edges),
                      MakeHistogram(reference, edges));
}

std::array<double, 3> PooledJs(std::span<const ProsodySequence> generated,
                               std::span<const ProsodySequence> reference) {
  std::array<double, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = JsDivergence(Gather(generated, c), Gather(reference, c));
  }
  return out;
}

std::array<double, 3> GroupedJs(std::span<const ProsodySequence> generated,
                                std::span<const int> generated_groups,
                                std::span<const ProsodySequence> reference,
                                std::span<const int> reference_groups) {
  if (generated.size() != generated_groups.size() ||
      reference.size() != reference_groups.size()) {
    throw std::invalid_argument("one group label per sequence required");
  }
  const std::set<int> gen_set(generated_groups.begin(), generated_groups.end());
  const std::set<int> ref_set(reference_groups.begin(), reference_groups.end());
  if (gen_set != ref_set || ref_set.empty()) {
    throw std::invalid_argument("generated and reference groups differ");
  }
  std::array<double, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    const std::vector<double> edges = ChannelEdges(Gather(reference, c));
    std::map<int, std::vector<double>> gen_values;
    std::map<int, std::vector<double>> ref_values;
    for (std::size_t i = 0; i < generated.size(); ++i) {
      const ProsodySequence& s = generated[i];
      auto& dst = gen_values[generated_groups[i]];
      for (std::size_t l = 0; l < s.length(); ++l) dst.push_back(s.at(c, l));
    }
    for (std::size_t i = 0; i < reference.size(); ++i) {
      const ProsodySequence& s = reference[i];
      auto& dst = ref_values[reference_groups[i]];
      for (std::size_t l = 0; l < s.length(); ++l) dst.push_back(s.at(c, l));
    }
    double sum = 0.0;
    for (int group : ref_set) {
      sum += JsDivergence(MakeHistogram(gen_values[group], edges),
                          MakeHistogram(ref_values[group], edges));
    }
    out[c] = sum / static_cast<double>(ref_set.size());
  }
  return out;
}

double CoefficientOfVariation(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cv of an empty sequence");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) throw std::invalid_argument("cv undefined for zero mean");
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return 100.0 * std::sqrt(ss / static_cast<double>(values.size())) / std::abs(mean);
}

std::vector<double> LinearChannel(const ProsodySequence& x, std::size_t channel) {
  std::vector<double> v = x.Channel(channel);
  if (channel != kEnergy) {
    for (double& e : v) e = std::exp(e);
  }
  return v;
}

ProsodyDescriptor Descriptor(const ProsodySequence& x) {
  const std::size_t n = x.length();
  if (n < 2) throw std::invalid_argument("descriptor needs at least 2 phonemes");
  ProsodyDescriptor d{};
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> v = x.Channel(c);
    const double count = static_cast<double>(n);
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= count;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double e : v) {
      const double dev = e - mean;
      m2 += dev * dev;
      m3 += dev * dev * dev;
      m4 += dev * dev * dev * dev;
    }
    m2 /= count;
    m3 /= count;
    m4 /= count;
    if (!(m2 > 0.0)) {
      throw std::invalid_argument(std::string("descriptor: channel ") +
                                  kChannelNames[c] + " is constant");
    }
    const double sd = std::sqrt(m2);
    std::sort(v.begin(), v.end());
    const double median =
        n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    double* out = d.data() + 7 * c;
    out[0] = mean;
    out[1] = sd;
    out[2] = median;
    out[3] = v.front();
    out[4] = v.back();
    out[5] = m3 / (m2 * sd);
    out[6] = m4 / (m2 * m2);
  }
  return d;
}

double ClusterSeparation(std::span<const ProsodyDescriptor> descriptors,
                         std::span<const int> labels) {
  if (descriptors.size() != labels.size()) {
    throw std::invalid_argument("one label per descriptor required");
  }
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  if (counts.size() < 2) throw std::invalid_argument("need at least 2 labels");
  for (const auto& [label, count] : counts) {
    if (count < 2) {
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " has fewer than 2 samples");
    }
  }
  const std::size_t n = descriptors.size();
  std::array<double, kDescriptorSize> mean{}, scale{};
  for (const ProsodyDescriptor& d : descriptors) {
    for (std::size_t k = 0; k < kDescriptorSize; ++k) mean[k] += d[k];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (const ProsodyDescriptor& d : descriptors) {
    for (std::size_t k = 0; k < kDescriptorSize; ++k) {
      scale[k] += (d[k] - mean[k]) * (d[k] - mean[k]);
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;
  }
  std::vector<ProsodyDescriptor> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < kDescriptorSize; ++k) {
      z[i][k] = (descriptors[i][k] - mean[k]) / scale[k];
    }
  }
  std::map<int, std::array<double, kDescriptorSize>> sums;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sums[labels[i]];
    for (std::size_t k = 0; k < kDescriptorSize; ++k) s[k] += z[i][k];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int best_label = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [label, sum] : sums) {
      const bool own = label == labels[i];
      const double members = static_cast<double>(counts[label] - (own ? 1 : 0));
      double dist = 0.0;
      for (std::size_t k = 0; k < kDescriptorSize; ++k) {
        const double centroid = (sum[k] - (own ? z[i][k] : 0.0)) / members;
        dist += (z[i][k] - centroid) * (z[i][k] - centroid);
      }
      if (dist < best) {
        best = dist;
        best_label = label;
      }
    }
    if (best_label == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace prosodiff
