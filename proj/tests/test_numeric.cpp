// Copyright 2026 The sslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "sslab/numeric.hpp"
#include "sslab/rng.hpp"

namespace sslab {
namespace {

TEST(CounterRng, PinnedConstruction) {
  const std::uint64_t seed = 42, stream = 3, counter = 17;
  std::uint64_t key = seed + 0x9E3779B97F4A7C15ULL * (counter + 1) + 0xD1B54A32D192ED03ULL * (stream + 1);
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  EXPECT_EQ(CounterBits(seed, stream, counter), mix(mix(key)));
}

TEST(CounterRng, UniformRange) {
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double u = CounterUniform(9, Stream::kHost, k);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CounterRng, StreamsDiffer) {
  int same = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    same += CounterBits(1, Stream::kHost, k) == CounterBits(1, Stream::kNoise, k);
  }
  EXPECT_EQ(same, 0);
}

TEST(CounterRng, GaussianMoments) {
  const std::size_t n = 200000;
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double g = CounterGaussian(5, Stream::kHost, k);
    s += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum acc;
  acc.Add(1e16);
  for (int k = 0; k < 1000; ++k) acc.Add(1.0);
  acc.Add(-1e16);
  EXPECT_DOUBLE_EQ(acc.Value(), 1000.0);
}

TEST(Numeric, NormalCdf) {
  EXPECT_DOUBLE_EQ(NormalCdf(0.0), 0.5);
  EXPECT_NEAR(NormalCdf(-1.0), 0.15865525393145705, 1e-15);
  EXPECT_NEAR(NormalCdf(1.959963984540054), 0.975, 1e-12);
}

TEST(Numeric, BisectFindsRoot) {
  const double r = Bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
}

TEST(Numeric, BisectRejectsMissingSignChange) {
  EXPECT_THROW(Bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-9), std::invalid_argument);
}

TEST(Numeric, KsStatisticOfUniformGrid) {
  std::vector<double> s;
  for (int k = 0; k < 100; ++k) s.push_back((k + 0.5) / 100.0);
  EXPECT_NEAR(KsStatistic(s, [](double x) { return x; }), 0.005, 1e-12);
}

TEST(Numeric, RelativeGap) {
  EXPECT_NEAR(RelativeGap(1.1, 1.0), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(RelativeGap(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(RelativeGap(3.0, -3.0), 2.0);
}

TEST(Numeric, RequireSameLength) {
  EXPECT_NO_THROW(RequireSameLength(3, 3, "x"));
  EXPECT_THROW(RequireSameLength(3, 4, "x"), std::invalid_argument);
}

}  // namespace
}  // namespace sslab
