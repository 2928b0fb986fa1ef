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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "prosodiff/eval.h"
#include "test_util.h"

namespace prosodiff {
namespace {

Histogram Hist(std::vector<double> masses) {
  Histogram h;
  h.masses = std::move(masses);
  for (std::size_t i = 0; i <= h.masses.size(); ++i) h.bin_edges.push_back(static_cast<double>(i));
  return h;
}

ProsodySequence RandomSequence(std::size_t len, Rng& rng, double shift = 0.0) {
  ProsodySequence x(len);
  for (double& v : x.values.values()) v = shift + rng.Normal();
  return x;
}

TEST(Js, IdenticalIsZero) {
  const Histogram p = Hist({0.1, 0.2, 0.7});
  EXPECT_EQ(JsDivergence(p, p), 0.0);
}

TEST(Js, DisjointIsLog2) {
  EXPECT_NEAR(JsDivergence(Hist({1.0, 0.0}), Hist({0.0, 1.0})), std::log(2.0), 1e-15);
  const std::vector<double> a = {0.1, 0.2, 0.3}, b = {10.0, 11.0, 12.0};
  const std::vector<double> edges = UniformEdges(0.0, 12.0, 50);
  EXPECT_NEAR(JsDivergence(MakeHistogram(a, edges, 0.0), MakeHistogram(b, edges, 0.0)),
              std::log(2.0), 1e-15);
}

TEST(Js, HandComputedSum) {
  const std::vector<double> p = {0.5, 0.3, 0.2, 0.0}, q = {0.1, 0.4, 0.25, 0.25};
  double oracle = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) oracle += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0) oracle += 0.5 * q[i] * std::log(q[i] / m);
  }
  EXPECT_NEAR(JsDivergence(Hist(p), Hist(q)), oracle, 1e-12);
}

TEST(Js, SymmetricAndBounded) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(8), q(8);
    for (double& v : p) v = std::max(0.0, rng.Normal());
    for (double& v : q) v = std::max(0.0, rng.Normal());
    p[0] += 0.1;
    q[7] += 0.1;
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    for (double& v : p) v /= sp;
    for (double& v : q) v /= sq;
    const double pq = JsDivergence(Hist(p), Hist(q));
    EXPECT_EQ(pq, JsDivergence(Hist(q), Hist(p)));
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, std::log(2.0));
  }
}

TEST(Js, RejectsMismatchedEdgesAndBadHistograms) {
  Histogram a = Hist({0.5, 0.5});
  Histogram b = Hist({0.5, 0.5});
  b.bin_edges[2] = 3.0;
  EXPECT_THROW(JsDivergence(a, b), std::invalid_argument);
  EXPECT_THROW(JsDivergence(a, Hist({0.5, 0.6})), std::invalid_argument);
  EXPECT_THROW(MakeHistogram(std::vector<double>{}, UniformEdges(0, 1, 4), 0.0),
               std::invalid_argument);
}

TEST(Histogram, BinningAndClamping) {
  const std::vector<double> edges = UniformEdges(0.0, 4.0, 4);
  EXPECT_EQ(edges, (std::vector<double>{0, 1, 2, 3, 4}));
  const Histogram h = MakeHistogram(std::vector<double>{-5.0, 0.5, 1.0, 3.9, 4.0, 9.0}, edges, 0.0);
  EXPECT_EQ(h.masses, (std::vector<double>{2.0 / 6, 1.0 / 6, 0.0, 3.0 / 6}));
  const std::vector<double> degenerate = UniformEdges(2.0, 2.0, 2);
  EXPECT_EQ(degenerate.front(), 1.5);
  EXPECT_EQ(degenerate.back(), 2.5);
  const Histogram s = MakeHistogram(std::vector<double>{0.5}, edges);
  for (double m : s.masses) EXPECT_GT(m, 0.0);
}

TEST(Js, GroupedAndPooled) {
  Rng rng(2);
  std::vector<ProsodySequence> ref, gen;
  std::vector<int> ref_groups, gen_groups;
  for (int i = 0; i < 40; ++i) {
    ref.push_back(RandomSequence(10, rng, i % 2 ? 3.0 : 0.0));
    ref_groups.push_back(i % 2);
    gen.push_back(RandomSequence(10, rng, i % 2 ? 0.0 : 3.0));
    gen_groups.push_back(i % 2);
  }
  const auto pooled = PooledJs(gen, ref);
  const auto grouped = GroupedJs(gen, gen_groups, ref, ref_groups);
  const auto self = GroupedJs(ref, ref_groups, ref, ref_groups);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_LT(pooled[c], 0.1);
    EXPECT_GT(grouped[c], 0.4);
    EXPECT_NEAR(self[c], 0.0, 1e-9);
  }
  std::vector<int> wrong(gen_groups.size(), 0);
  EXPECT_THROW(GroupedJs(gen, wrong, ref, ref_groups), std::invalid_argument);
}

TEST(Cv, Examples) {
  EXPECT_EQ(CoefficientOfVariation(std::vector<double>{1.0, 3.0}), 50.0);
  EXPECT_EQ(CoefficientOfVariation(std::vector<double>{4.0, 4.0, 4.0}), 0.0);
  EXPECT_THROW(CoefficientOfVariation(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(CoefficientOfVariation(std::vector<double>{-1.0, 1.0}), std::invalid_argument);
}

TEST(LinearChannel, ExponentiatesLogChannels) {
  ProsodySequence x(2);
  x.at(kLogPitch, 0) = 0.0;
  x.at(kLogPitch, 1) = std::log(2.0);
  x.at(kEnergy, 0) = 3.0;
  x.at(kEnergy, 1) = 4.0;
  x.at(kLogDuration, 1) = 1.0;
  EXPECT_NEAR(LinearChannel(x, kLogPitch)[1], 2.0, 1e-15);
  EXPECT_EQ(LinearChannel(x, kEnergy), (std::vector<double>{3.0, 4.0}));
  EXPECT_EQ(LinearChannel(x, kLogDuration)[0], 1.0);
}

TEST(Descriptor, ConstantChannelThrows) {
  Rng rng(3);
  ProsodySequence x = RandomSequence(5, rng);
  for (std::size_t l = 0; l < 5; ++l) x.at(kEnergy, l) = 2.0;
  EXPECT_THROW(Descriptor(x), std::invalid_argument);
  EXPECT_THROW(Descriptor(RandomSequence(1, rng)), std::invalid_argument);
}

TEST(Descriptor, SymmetricValuesHaveZeroSkew) {
  ProsodySequence x(5);
  const double vals[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t l = 0; l < 5; ++l) x.at(c, l) = 10.0 * static_cast<double>(c) + vals[l];
  }
  const ProsodyDescriptor d = Descriptor(x);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(d[7 * c + 5], 0.0, 1e-12);
}

TEST(Descriptor, MatchesMomentOracle) {
  Rng rng(4);
  const ProsodySequence x = RandomSequence(13, rng);
  const ProsodyDescriptor d = Descriptor(x);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> v = x.Channel(c);
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double e : v) {
      m2 += std::pow(e - mean, 2) / n;
      m3 += std::pow(e - mean, 3) / n;
      m4 += std::pow(e - mean, 4) / n;
    }
    std::sort(v.begin(), v.end());
    EXPECT_NEAR(d[7 * c + 0], mean, 1e-10);
    EXPECT_NEAR(d[7 * c + 1], std::sqrt(m2), 1e-10);
    EXPECT_NEAR(d[7 * c + 2], v[6], 1e-10);
    EXPECT_NEAR(d[7 * c + 3], v.front(), 1e-10);
    EXPECT_NEAR(d[7 * c + 4], v.back(), 1e-10);
    EXPECT_NEAR(d[7 * c + 5], m3 / std::pow(m2, 1.5), 1e-10);
    EXPECT_NEAR(d[7 * c + 6], m4 / (m2 * m2), 1e-10);
  }
}

TEST(Descriptor, PermutationInvariant) {
  Rng rng(5);
  const ProsodySequence x = RandomSequence(12, rng);
  ProsodySequence y(12);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t l = 0; l < 12; ++l) y.at(c, l) = x.at(c, perm[l]);
  }
  const ProsodyDescriptor a = Descriptor(x), b = Descriptor(y);
  for (std::size_t k = 0; k < kDescriptorSize; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(ClusterSeparation, FarApartLabelsAreSeparable) {
  std::vector<ProsodyDescriptor> d;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    ProsodyDescriptor v{};
    v.fill(i % 2 ? 100.0 : -100.0);
    d.push_back(v);
    labels.push_back(i % 2);
  }
  EXPECT_EQ(ClusterSeparation(d, labels), 1.0);
  EXPECT_THROW(ClusterSeparation(d, std::vector<int>(10, 0)), std::invalid_argument);
  EXPECT_THROW(ClusterSeparation(d, std::vector<int>(9, 0)), std::invalid_argument);
}

TEST(ClusterSeparation, RandomLabelsGiveChance) {
  Rng rng(6);
  const int labels_count = 4, per_label = 25, repeats = 60;
  double total = 0.0;
  for (int r = 0; r < repeats; ++r) {
    std::vector<ProsodyDescriptor> d;
    std::vector<int> labels;
    for (int i = 0; i < labels_count * per_label; ++i) {
      ProsodyDescriptor v;
      for (double& e : v) e = rng.Normal();
      d.push_back(v);
      labels.push_back(i % labels_count);
    }
    total += ClusterSeparation(d, labels);
  }
  EXPECT_NEAR(total / repeats, 1.0 / labels_count, 0.05);
}

}  // namespace
}  // namespace prosodiff
