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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "sslab/numeric.hpp"
#include "sslab/rng.hpp"
#include "sslab/signal_model.hpp"

namespace sslab {
namespace {

TEST(GenerateHost, ZeroVarianceHostIsZero) {
  const auto h = GenerateHost(4, profile::Constant{0.0}, 1);
  EXPECT_EQ(h.x, std::vector<double>(4, 0.0));
  EXPECT_EQ(h.model.sigma_x, std::vector<double>(4, 0.0));
}

TEST(GenerateHost, SampleVarianceOfConstantProfile) {
  const auto h = GenerateHost(100000, profile::Constant{2.0}, 7);
  double s2 = 0.0;
  for (double v : h.x) s2 += v * v;
  const double var = s2 / static_cast<double>(h.x.size());
  EXPECT_GE(var, 3.9);
  EXPECT_LE(var, 4.1);
}

TEST(GenerateHost, RampEndpoints) {
  const auto h = GenerateHost(2, profile::LinearRamp{1.0, 3.0}, 5);
  EXPECT_EQ(h.model.sigma_x, (std::vector<double>{1.0, 3.0}));
}

TEST(GenerateHost, ModelCarriesPerceptualWeights) {
  const auto h = GenerateHost(3, profile::Constant{3.0}, 5);
  for (double p : h.model.phi) EXPECT_DOUBLE_EQ(p, 0.5);
  const auto u = GenerateHost(3, profile::Constant{3.0}, 5, WeightRule::kUnit);
  for (double p : u.model.phi) EXPECT_DOUBLE_EQ(p, 1.0);
}

TEST(GenerateHost, RejectsBadInput) {
  EXPECT_THROW(GenerateHost(0, profile::Constant{1.0}, 1), std::invalid_argument);
  EXPECT_THROW(GenerateHost(3, profile::Constant{-1.0}, 1), std::invalid_argument);
  EXPECT_THROW(GenerateHost(3, profile::LinearRamp{-1.0, 1.0}, 1), std::invalid_argument);
  EXPECT_THROW(GenerateHost(3, profile::Piecewise{{1.0, -2.0}}, 1), std::invalid_argument);
}

TEST(GenerateHost, Reproducible) {
  const auto a = GenerateHost(1000, profile::LinearRamp{0.5, 20.0}, 99);
  const auto b = GenerateHost(1000, profile::LinearRamp{0.5, 20.0}, 99);
  EXPECT_EQ(a.x, b.x);
  const auto c = GenerateHost(1000, profile::LinearRamp{0.5, 20.0}, 100);
  EXPECT_NE(a.x, c.x);
}

TEST(GenerateHost, ScheduleIndependent) {
  const auto h = GenerateHost(500, profile::LinearRamp{1.0, 4.0}, 3);
  // Evaluate the sites backwards, one at a time.
  for (std::size_t k = 500; k-- > 0;) {
    EXPECT_EQ(h.x[k], h.model.sigma_x[k] * CounterGaussian(3, Stream::kHost, k));
  }
  // A prefix of a longer host with the same per-site sigma agrees.
  const auto longer = GenerateHost(1000, profile::Constant{2.0}, 3);
  const auto shorter = GenerateHost(10, profile::Constant{2.0}, 3);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(longer.x[k], shorter.x[k]);
}

TEST(GenerateHost, KolmogorovSmirnovNormality) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const double sigma = 2.5;
    const auto h = GenerateHost(20000, profile::Constant{sigma}, seed);
    std::vector<double> z(h.x.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = h.x[i] / sigma;
    EXPECT_LT(KsStatistic(z, NormalCdf), KsCritical1Percent(z.size())) << "seed " << seed;
  }
}

TEST(Profiles, ParseAndShape) {
  EXPECT_EQ(ProfileSigmas(ParseProfile("constant:2"), 3), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(ProfileSigmas(ParseProfile("ramp:1:3"), 3), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(ProfileSigmas(ParseProfile("piecewise:1,5"), 4), (std::vector<double>{1, 1, 5, 5}));
  const auto p = ProfileSigmas(ParseProfile("powerlaw:0.5:4"), 4);
  EXPECT_DOUBLE_EQ(p[0], 4.0);
  EXPECT_DOUBLE_EQ(p[3], 2.0);
  const auto q = ProfileSigmas(ParseProfile("powerlaw:1"), 2);
  EXPECT_DOUBLE_EQ(q[1], 0.5);
}

TEST(Profiles, ParseErrors) {
  for (const char* bad : {"", "ramp:1", "ramp:1:2:3", "constant:x", "wave:1", "piecewise:", "powerlaw"}) {
    EXPECT_THROW(ParseProfile(bad), std::invalid_argument) << bad;
  }
}

TEST(EstimateSiteVariances, FloorOnZeros) {
  const std::vector<double> z(7, 0.0);
  for (double s : EstimateSiteVariances(z, 3, 1e-6)) EXPECT_EQ(s, 1e-6);
}

TEST(EstimateSiteVariances, FloorOnConstant) {
  const std::vector<double> c(9, 4.25);
  for (long w : {1L, 3L, 5L, 9L}) {
    for (double s : EstimateSiteVariances(c, w, 1e-3)) EXPECT_EQ(s, 1e-3);
  }
}

TEST(EstimateSiteVariances, HandValue) {
  const std::vector<double> v{0, 0, 3, 0, 0};
  const auto s = EstimateSiteVariances(v, 3, 1e-6);
  EXPECT_NEAR(s[2], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1], std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s[0], 1e-6);  // reflected window (0, 0, 0)
}

TEST(EstimateSiteVariances, ReflectsAtBoundaries) {
  const std::vector<double> v{3, 0, 0, 0};
  // Window at site 0 is (v[1], v[0], v[1]) = (0, 3, 0).
  EXPECT_NEAR(EstimateSiteVariances(v, 3, 1e-6)[0], std::sqrt(2.0), 1e-15);
}

TEST(EstimateSiteVariances, RejectsBadWindow) {
  const std::vector<double> v(5, 1.0);
  EXPECT_THROW(EstimateSiteVariances(v, 2, 1e-6), std::invalid_argument);
  EXPECT_THROW(EstimateSiteVariances(v, 0, 1e-6), std::invalid_argument);
  EXPECT_THROW(EstimateSiteVariances(v, -3, 1e-6), std::invalid_argument);
  EXPECT_THROW(EstimateSiteVariances(v, 7, 1e-6), std::invalid_argument);
  EXPECT_THROW(EstimateSiteVariances(v, 3, 0.0), std::invalid_argument);
}

TEST(EstimateSiteVariances, ShiftInvariant) {
  const auto h = GenerateHost(300, profile::LinearRamp{0.5, 5.0}, 11);
  for (double shift : {-7.0, 0.5, 13.0}) {
    std::vector<double> moved = h.x;
    for (double& v : moved) v += shift;
    const auto a = EstimateSiteVariances(h.x, 9, 1e-6);
    const auto b = EstimateSiteVariances(moved, 9, 1e-6);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * (1.0 + a[i]));
  }
}

TEST(EstimateSiteVariances2D, HandValueAndShift) {
  std::vector<double> img(25, 0.0);
  img[12] = 3.0;  // center of a 5x5 array
  const auto s = EstimateSiteVariances2D(img, 5, 5, 3, 1e-6);
  // Nine-sample window holding one 3: std = sqrt(9/9 - (3/9)^2) = sqrt(8)/3.
  EXPECT_NEAR(s[12], std::sqrt(8.0) / 3.0, 1e-15);
  std::vector<double> moved = img;
  for (double& v : moved) v -= 2.0;
  const auto t = EstimateSiteVariances2D(moved, 5, 5, 3, 1e-6);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], t[i], 1e-12);
  EXPECT_THROW(EstimateSiteVariances2D(img, 5, 4, 3, 1e-6), std::invalid_argument);
  EXPECT_THROW(EstimateSiteVariances2D(img, 5, 5, 4, 1e-6), std::invalid_argument);
}

TEST(PerceptualWeights, Values) {
  const std::vector<double> s{0.0, 3.0, 10.0};
  const auto phi = PerceptualWeights(s);
  EXPECT_DOUBLE_EQ(phi[0], 1.0);
  EXPECT_DOUBLE_EQ(phi[1], 0.5);
  EXPECT_NEAR(phi[2], 0.301511, 1e-6);
  for (double p : PerceptualWeights(s, WeightRule::kUnit)) EXPECT_EQ(p, 1.0);
  EXPECT_EQ(ParseWeightRule("default"), WeightRule::kPerceptual);
  EXPECT_EQ(ParseWeightRule("unit"), WeightRule::kUnit);
  EXPECT_THROW(ParseWeightRule("bogus"), std::invalid_argument);
}

TEST(SiteModel, Validate) {
  EXPECT_NO_THROW((SiteModel{{1.0}, {1.0}}.Validate()));
  EXPECT_THROW((SiteModel{{}, {}}.Validate()), std::invalid_argument);
  EXPECT_THROW((SiteModel{{1.0}, {1.0, 1.0}}.Validate()), std::invalid_argument);
  EXPECT_THROW((SiteModel{{-1.0}, {1.0}}.Validate()), std::invalid_argument);
  EXPECT_THROW((SiteModel{{1.0}, {0.0}}.Validate()), std::invalid_argument);
}

TEST(SpreadingCode, DeterministicAndSigned) {
  const SpreadingCode a(17, 8, 300), b(17, 8, 300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const int g = a(i, j);
      ASSERT_TRUE(g == 1 || g == -1);
      ASSERT_EQ(g, b(i, j));
    }
  }
  EXPECT_THROW(SpreadingCode(1, 0, 3), std::invalid_argument);
  EXPECT_THROW(SpreadingCode(1, 3, 0), std::invalid_argument);
}

TEST(SpreadingCode, BalancedAndUncorrelated) {
  const std::size_t m = 100000;
  const SpreadingCode g(3, 2, m);
  long r0 = 0, r1 = 0, c = 0;
  for (std::size_t i = 0; i < m; ++i) {
    r0 += g(i, 0);
    r1 += g(i, 1);
    c += g(i, 0) * g(i, 1);
  }
  const double md = static_cast<double>(m);
  EXPECT_LE(std::abs(r0 / md), 0.02);
  EXPECT_LE(std::abs(r1 / md), 0.02);
  EXPECT_LE(std::abs(c / md), 0.02);
}

TEST(Message, ValidateAndRandom) {
  EXPECT_THROW(Message{}.Validate(), std::invalid_argument);
  EXPECT_THROW((Message{{1, 0}}.Validate()), std::invalid_argument);
  const Message m = RandomMessage(64, 5);
  EXPECT_NO_THROW(m.Validate());
  EXPECT_EQ(m.bits, RandomMessage(64, 5).bits);
  const long ones = std::count(m.bits.begin(), m.bits.end(), 1);
  EXPECT_GT(ones, 16);
  EXPECT_LT(ones, 48);
}

}  // namespace
}  // namespace sslab
