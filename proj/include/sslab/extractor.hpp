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

// MAP soft decoding over the SAWGN channel. Each bit sees a Gaussian channel
// whose per-site noise is the host, the other n-1 bits and the attack noise:
//   V_i    = gamma_i^2 (sigma_X_i^2 + alpha_i^2 (n-1)) + sigma_delta_i^2
//   bhat_j = [sum_i gamma_i alpha_i y'_i G(i,j) / V_i] / [sum_i gamma_i^2 alpha_i^2 / V_i]
//   sigma_b^2 = 1 / sum_i gamma_i^2 alpha_i^2 / V_i = 1 / (Eb/N0)

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sslab/attack.hpp"
#include "sslab/numeric.hpp"
#include "sslab/signal_model.hpp"

namespace sslab {

// What the extractor believes about the channel.
struct ChannelAssumption {
  std::vector<double> gamma;
  std::vector<double> sigma_delta;
  std::vector<double> alpha;
  std::vector<double> sigma_x;
  std::size_t n = 1;

  std::size_t size() const { return alpha.size(); }

  // No attack assumed: gamma = 1, sigma_delta = 0.
  static ChannelAssumption Unattacked(std::span<const double> alpha, const SiteModel& model,
                                      std::size_t n) {
    RequireSameLength(alpha.size(), model.size(), "ChannelAssumption");
    ChannelAssumption a;
    a.gamma.assign(alpha.size(), 1.0);
    a.sigma_delta.assign(alpha.size(), 0.0);
    a.alpha.assign(alpha.begin(), alpha.end());
    a.sigma_x = model.sigma_x;
    a.n = n;
    return a;
  }

  // The extractor knows the attack plan exactly.
  static ChannelAssumption Matched(std::span<const double> alpha, const SiteModel& model,
                                   std::size_t n, const AttackPlan& attack) {
    ChannelAssumption a = Unattacked(alpha, model, n);
    RequireSameLength(alpha.size(), attack.size(), "ChannelAssumption");
    a.gamma = attack.gamma;
    a.sigma_delta = attack.sigma_delta;
    return a;
  }

  void Validate() const {
    RequireSameLength(gamma.size(), alpha.size(), "ChannelAssumption");
    RequireSameLength(sigma_delta.size(), alpha.size(), "ChannelAssumption");
    RequireSameLength(sigma_x.size(), alpha.size(), "ChannelAssumption");
    if (n == 0) throw std::invalid_argument("ChannelAssumption: n must be >= 1");
    bool any_energy = false;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (double v : {gamma[i], sigma_delta[i], alpha[i], sigma_x[i]}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw std::invalid_argument("ChannelAssumption: entries must be finite and >= 0");
        }
      }
      any_energy = any_energy || gamma[i] * alpha[i] > 0.0;
    }
    if (!any_energy) {
      throw std::invalid_argument("ChannelAssumption: no site carries watermark energy");
    }
  }
};

struct DecodeReport {
  std::vector<double> soft;
  double sigma_b_sq = 0.0;
  double eb_n0 = 0.0;
  std::vector<int> hard;
  std::optional<double> ber;
};

inline double ChannelVariance(std::size_t i, const ChannelAssumption& a) {
  const double g = a.gamma[i];
  const double sx = a.sigma_x[i];
  const double al = a.alpha[i];
  const double sd = a.sigma_delta[i];
  return g * g * (sx * sx + al * al * (static_cast<double>(a.n) - 1.0)) + sd * sd;
}

namespace detail {
// Returns gamma^2 alpha^2 / V_i, or 0 at sites without watermark energy.
inline double SiteEnergy(std::size_t i, const ChannelAssumption& a) {
  const double ga = a.gamma[i] * a.alpha[i];
  if (ga == 0.0) return 0.0;
  const double v = ChannelVariance(i, a);
  if (!(v > 0.0)) {
    throw std::invalid_argument("degenerate channel: V_i = 0 at a marked site");
  }
  return ga * ga / v;
}
}  // namespace detail

// Eb/N0 = sum_i rho_i, rho_i = alpha_i^2 gamma_i^2 / V_i.
inline double EbN0(const ChannelAssumption& a) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.Add(detail::SiteEnergy(i, a));
  return acc.Value();
}

inline std::vector<double> SiteRho(const ChannelAssumption& a) {
  std::vector<double> rho(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) rho[i] = detail::SiteEnergy(i, a);
  return rho;
}

// Zero soft values decide +1.
inline std::vector<int> HardDecision(std::span<const double> soft) {
  std::vector<int> hard(soft.size());
  for (std::size_t j = 0; j < soft.size(); ++j) hard[j] = soft[j] >= 0.0 ? 1 : -1;
  return hard;
}

inline double BitErrorRate(std::span<const int> hard, std::span<const int> truth) {
  RequireSameLength(hard.size(), truth.size(), "BitErrorRate");
  if (hard.empty()) throw std::invalid_argument("BitErrorRate: empty message");
  std::size_t errors = 0;
  for (std::size_t j = 0; j < hard.size(); ++j) {
    if (truth[j] != 1 && truth[j] != -1) throw std::invalid_argument("BitErrorRate: truth must be +/-1");
    errors += hard[j] != truth[j] ? 1 : 0;
  }
  return static_cast<double>(errors) / static_cast<double>(hard.size());
}

inline DecodeReport MapDecode(std::span<const double> y_prime, const SpreadingCode& code,
                              const ChannelAssumption& a) {
  a.Validate();
  RequireSameLength(y_prime.size(), a.size(), "MapDecode");
  RequireSameLength(code.m(), a.size(), "MapDecode");
  if (code.n() != a.n) throw std::invalid_argument("MapDecode: code and assumption disagree on n");
  const std::size_t n = a.n;
  std::vector<CompensatedSum> numer(n);
  CompensatedSum denom;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double energy = detail::SiteEnergy(i, a);
    if (energy == 0.0) continue;
    denom.Add(energy);
    const double weight = a.gamma[i] * a.alpha[i] / ChannelVariance(i, a) * y_prime[i];
    for (std::size_t j = 0; j < n; ++j) numer[j].Add(code(i, j) > 0 ? weight : -weight);
  }
  DecodeReport report;
  const double s = denom.Value();
  report.sigma_b_sq = 1.0 / s;
  report.eb_n0 = s;
  report.soft.resize(n);
  for (std::size_t j = 0; j < n; ++j) report.soft[j] = numer[j].Value() / s;
  report.hard = HardDecision(report.soft);
  return report;
}

inline DecodeReport MapDecode(std::span<const double> y_prime, const SpreadingCode& code,
                              const ChannelAssumption& a, const Message& truth) {
  DecodeReport report = MapDecode(y_prime, code, a);
  report.ber = BitErrorRate(report.hard, truth.bits);
  return report;
}

}  // namespace sslab
