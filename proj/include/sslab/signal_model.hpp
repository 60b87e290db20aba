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

// Host-signal model: independent, non identically distributed zero-mean
// Gaussian sites, perceptual weights, and the +/-1 spreading code.
//
// Throughout the library sigma_x holds per-site STANDARD DEVIATIONS; every
// formula squares them where a variance is required.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sslab/rng.hpp"

namespace sslab {

inline constexpr double kDefaultVarianceFloor = 1e-6;

struct SiteModel {
  std::vector<double> sigma_x;
  std::vector<double> phi;

  std::size_t size() const { return sigma_x.size(); }
  double variance(std::size_t i) const { return sigma_x[i] * sigma_x[i]; }

  void Validate() const {
    if (sigma_x.empty()) throw std::invalid_argument("SiteModel: m must be >= 1");
    if (sigma_x.size() != phi.size()) {
      throw std::invalid_argument("SiteModel: sigma_x and phi lengths differ");
    }
    for (std::size_t i = 0; i < sigma_x.size(); ++i) {
      if (!(sigma_x[i] >= 0.0) || !std::isfinite(sigma_x[i])) {
        throw std::invalid_argument("SiteModel: sigma_x must be finite and >= 0");
      }
      if (!(phi[i] > 0.0) || !std::isfinite(phi[i])) {
        throw std::invalid_argument("SiteModel: phi must be finite and > 0");
      }
    }
  }
};

enum class WeightRule { kPerceptual, kUnit };

inline WeightRule ParseWeightRule(const std::string& text) {
  if (text == "perceptual" || text == "default") return WeightRule::kPerceptual;
  if (text == "unit") return WeightRule::kUnit;
  throw std::invalid_argument("unknown weight rule '" + text + "'");
}

inline std::string ToString(WeightRule rule) {
  return rule == WeightRule::kUnit ? "unit" : "perceptual";
}

// phi_i = (1 + sigma_i)^(-1/2) for the perceptual rule, 1 for the unit rule.
inline std::vector<double> PerceptualWeights(std::span<const double> sigma_x,
                                             WeightRule rule = WeightRule::kPerceptual) {
  std::vector<double> phi(sigma_x.size(), 1.0);
  if (rule == WeightRule::kPerceptual) {
    for (std::size_t i = 0; i < sigma_x.size(); ++i) {
      if (sigma_x[i] < 0.0) throw std::invalid_argument("PerceptualWeights: sigma < 0");
      phi[i] = 1.0 / std::sqrt(1.0 + sigma_x[i]);
    }
  }
  return phi;
}

// Variance profiles for synthetic hosts.
namespace profile {
struct Constant {
  double sigma;
};
// Linear in the site index from sigma_lo (site 0) to sigma_hi (site m-1).
struct LinearRamp {
  double sigma_lo;
  double sigma_hi;
};
// Equal-length blocks, one sigma per block, in order.
struct Piecewise {
  std::vector<double> sigmas;
};
// sigma_i = scale * (i + 1)^(-exponent).
struct PowerLaw {
  double exponent;
  double scale = 1.0;
};
}  // namespace profile

using VarianceProfile = std::variant<profile::Constant, profile::LinearRamp,
                                     profile::Piecewise, profile::PowerLaw>;

namespace detail {
inline std::vector<std::string> SplitOn(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

inline double ParseReal(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}
}  // namespace detail

// Text form used by config files:
//   constant:S | ramp:LO:HI | piecewise:S1,S2,... | powerlaw:EXP[:SCALE]
inline VarianceProfile ParseProfile(const std::string& text) {
  const auto parts = detail::SplitOn(text, ':');
  if (parts.empty()) throw std::invalid_argument("empty variance profile");
  const std::string& kind = parts[0];
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) {
      throw std::invalid_argument("malformed variance profile '" + text + "'");
    }
  };
  if (kind == "constant") {
    need(2, 2);
    return profile::Constant{detail::ParseReal(parts[1])};
  }
  if (kind == "ramp") {
    need(3, 3);
    return profile::LinearRamp{detail::ParseReal(parts[1]), detail::ParseReal(parts[2])};
  }
  if (kind == "piecewise") {
    need(2, 2);
    profile::Piecewise p;
    for (const auto& s : detail::SplitOn(parts[1], ',')) p.sigmas.push_back(detail::ParseReal(s));
    if (p.sigmas.empty()) throw std::invalid_argument("piecewise profile needs values");
    return p;
  }
  if (kind == "powerlaw") {
    need(2, 3);
    profile::PowerLaw p{detail::ParseReal(parts[1])};
    if (parts.size() == 3) p.scale = detail::ParseReal(parts[2]);
    return p;
  }
  throw std::invalid_argument("unknown variance profile '" + kind + "'");
}

inline std::vector<double> ProfileSigmas(const VarianceProfile& prof, std::size_t m) {
  if (m == 0) throw std::invalid_argument("site count must be >= 1");
  std::vector<double> sigma(m);
  struct Visitor {
    std::vector<double>& sigma;
    void operator()(const profile::Constant& p) const {
      for (auto& s : sigma) s = p.sigma;
    }
    void operator()(const profile::LinearRamp& p) const {
      const std::size_t m = sigma.size();
      for (std::size_t i = 0; i < m; ++i) {
        const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
        sigma[i] = p.sigma_lo + (p.sigma_hi - p.sigma_lo) * t;
      }
      if (m > 1) sigma.back() = p.sigma_hi;
    }
    void operator()(const profile::Piecewise& p) const {
      const std::size_t m = sigma.size();
      const std::size_t k = p.sigmas.size();
      for (std::size_t i = 0; i < m; ++i) sigma[i] = p.sigmas[i * k / m];
    }
    void operator()(const profile::PowerLaw& p) const {
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        sigma[i] = p.scale * std::pow(static_cast<double>(i + 1), -p.exponent);
      }
    }
  };
  std::visit(Visitor{sigma}, prof);
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("variance profile yields a negative or non-finite sigma");
    }
  }
  return sigma;
}

struct HostSample {
  std::vector<double> x;
  SiteModel model;
};

// Draws x_i ~ N(0, sigma_i^2) with sigma following the profile. Site i uses
// Gaussian draw i of the host stream, so the result is schedule independent.
inline HostSample GenerateHost(std::size_t m, const VarianceProfile& prof, std::uint64_t seed,
                               WeightRule rule = WeightRule::kPerceptual) {
  HostSample out;
  out.model.sigma_x = ProfileSigmas(prof, m);
  out.model.phi = PerceptualWeights(out.model.sigma_x, rule);
  out.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.x[i] = out.model.sigma_x[i] * CounterGaussian(seed, Stream::kHost, i);
  }
  return out;
}

namespace detail {
// Mirror an out-of-range index back into [0, len): -1 -> 1, len -> len - 2.
inline std::size_t Reflect(std::ptrdiff_t k, std::ptrdiff_t len) {
  if (len == 1) return 0;
  const std::ptrdiff_t period = 2 * (len - 1);
  k %= period;
  if (k < 0) k += period;
  if (k >= len) k = period - k;
  return static_cast<std::size_t>(k);
}

inline void CheckWindow(long window, std::size_t len) {
  if (window <= 0 || window % 2 == 0) {
    throw std::invalid_argument("variance window must be a positive odd integer");
  }
  if (static_cast<std::size_t>(window) > len) {
    throw std::invalid_argument("variance window exceeds the sample length");
  }
}

inline double WindowStd(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}
}  // namespace detail

// sigma_i = max(floor, population std over the centered window), with the
// window reflected at the boundaries.
inline std::vector<double> EstimateSiteVariances(std::span<const double> samples, long window,
                                                 double floor = kDefaultVarianceFloor) {
  detail::CheckWindow(window, samples.size());
  if (!(floor > 0.0)) throw std::invalid_argument("variance floor must be > 0");
  const auto len = static_cast<std::ptrdiff_t>(samples.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(samples.size());
  std::vector<double> buf(static_cast<std::size_t>(window));
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      buf[static_cast<std::size_t>(k + half)] = samples[detail::Reflect(i + k, len)];
    }
    out[static_cast<std::size_t>(i)] = std::max(floor, detail::WindowStd(buf));
  }
  return out;
}

// Same estimator over a square window on a row-major rows x cols array.
inline std::vector<double> EstimateSiteVariances2D(std::span<const double> samples,
                                                   std::size_t rows, std::size_t cols,
                                                   long window,
                                                   double floor = kDefaultVarianceFloor) {
  if (rows * cols != samples.size()) {
    throw std::invalid_argument("EstimateSiteVariances2D: shape does not match data");
  }
  detail::CheckWindow(window, std::min(rows, cols));
  if (!(floor > 0.0)) throw std::invalid_argument("variance floor must be > 0");
  const std::ptrdiff_t half = window / 2;
  const auto r_len = static_cast<std::ptrdiff_t>(rows);
  const auto c_len = static_cast<std::ptrdiff_t>(cols);
  std::vector<double> out(samples.size());
  std::vector<double> buf(static_cast<std::size_t>(window * window));
  for (std::ptrdiff_t r = 0; r < r_len; ++r) {
    for (std::ptrdiff_t c = 0; c < c_len; ++c) {
      std::size_t k = 0;
      for (std::ptrdiff_t dr = -half; dr <= half; ++dr) {
        const std::size_t rr = detail::Reflect(r + dr, r_len);
        for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
          buf[k++] = samples[rr * cols + detail::Reflect(c + dc, c_len)];
        }
      }
      out[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] =
          std::max(floor, detail::WindowStd(buf));
    }
  }
  return out;
}

// Pseudo-random +/-1 code. Entry (site i, bit j) is a pure function of
// (seed, i, j); nothing is stored.
class SpreadingCode {
 public:
  SpreadingCode(std::uint64_t seed, std::size_t n, std::size_t m) : seed_(seed), n_(n), m_(m) {
    if (n == 0 || m == 0) throw std::invalid_argument("SpreadingCode: n and m must be >= 1");
  }

  int operator()(std::size_t site, std::size_t bit) const {
    const std::uint64_t counter = (static_cast<std::uint64_t>(site) << 32) | bit;
    return (CounterBits(seed_, Stream::kCode, counter) >> 63) != 0 ? 1 : -1;
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

 private:
  std::uint64_t seed_;
  std::size_t n_;
  std::size_t m_;
};

struct Message {
  std::vector<int> bits;

  std::size_t size() const { return bits.size(); }

  void Validate() const {
    if (bits.empty()) throw std::invalid_argument("Message: n must be >= 1");
    for (int b : bits) {
      if (b != 1 && b != -1) throw std::invalid_argument("Message: bits must be +/-1");
    }
  }
};

inline Message RandomMessage(std::size_t n, std::uint64_t seed) {
  Message msg;
  msg.bits.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    msg.bits[j] = (CounterBits(seed, Stream::kMessage, j) >> 63) != 0 ? 1 : -1;
  }
  return msg;
}

}  // namespace sslab
