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

#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so values do not depend on evaluation order and
// site-parallel loops reproduce sequential results bit for bit.
//
// Pinned construction (other implementations must match it exactly):
//   key   = seed + 0x9E3779B97F4A7C15 * (counter + 1)
//               + 0xD1B54A32D192ED03 * (stream + 1)     (mod 2^64)
//   bits  = mix(mix(key))   with mix = the splitmix64 finalizer
//   unit  = (bits >> 11) * 2^-53                        in [0, 1)
//   gauss = sqrt(-2 ln(1 - unit(2c))) * cos(2 pi unit(2c + 1))

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sslab {

// Streams used by the library. Distinct streams keep host, code, message and
// noise draws independent under a shared seed.
enum class Stream : std::uint64_t {
  kHost = 1,
  kCode = 2,
  kMessage = 3,
  kNoise = 4,
  kTrial = 5,
  kOracle = 6,
};

constexpr std::uint64_t SplitMix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t CounterBits(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter) {
  const std::uint64_t key = seed + 0x9E3779B97F4A7C15ULL * (counter + 1) +
                            0xD1B54A32D192ED03ULL * (stream + 1);
  return SplitMix(SplitMix(key));
}

constexpr std::uint64_t CounterBits(std::uint64_t seed, Stream stream,
                                    std::uint64_t counter) {
  return CounterBits(seed, static_cast<std::uint64_t>(stream), counter);
}

// Uniform on [0, 1) with 53 random bits.
constexpr double CounterUniform(std::uint64_t seed, Stream stream,
                                std::uint64_t counter) {
  return static_cast<double>(CounterBits(seed, stream, counter) >> 11) *
         0x1.0p-53;
}

// Standard normal draw number `index` of the stream (Box-Muller, cosine
// branch only).
inline double CounterGaussian(std::uint64_t seed, Stream stream,
                              std::uint64_t index) {
  const double u1 = 1.0 - CounterUniform(seed, stream, 2 * index);  // (0, 1]
  const double u2 = CounterUniform(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Derives an independent child seed, e.g. one per Monte Carlo trial.
constexpr std::uint64_t SubSeed(std::uint64_t seed, Stream stream,
                                std::uint64_t index) {
  return CounterBits(seed, stream, index);
}

}  // namespace sslab
