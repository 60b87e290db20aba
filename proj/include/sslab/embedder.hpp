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

// Additive spread-spectrum embedding y_i = x_i + alpha_i * sum_j G(i,j) b_j,
// the optional Wiener post-filter, and distortion accounting.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sslab/numeric.hpp"
#include "sslab/signal_model.hpp"

namespace sslab {

struct EmbeddingPlan {
  Message message;
  std::vector<double> alpha;
  std::uint64_t code_seed = 0;
  bool postfilter = false;

  std::size_t n() const { return message.size(); }
  SpreadingCode code() const { return SpreadingCode(code_seed, message.size(), alpha.size()); }

  void Validate() const {
    message.Validate();
    if (alpha.empty()) throw std::invalid_argument("EmbeddingPlan: alpha is empty");
    for (double a : alpha) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("EmbeddingPlan: alpha must be finite and >= 0");
      }
    }
  }
};

// Watermark power sigma_W^2 = n alpha_i^2 per site.
inline std::vector<double> WatermarkPower(std::span<const double> alpha, std::size_t n) {
  std::vector<double> out(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = static_cast<double>(n) * alpha[i] * alpha[i];
  }
  return out;
}

// The mark w = y - x alone (before any post-filter).
inline std::vector<double> Watermark(const EmbeddingPlan& plan) {
  plan.Validate();
  const SpreadingCode code = plan.code();
  const std::size_t n = plan.n();
  std::vector<double> w(plan.alpha.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (plan.alpha[i] == 0.0) continue;
    long acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += code(i, j) * plan.message.bits[j];
    w[i] = plan.alpha[i] * static_cast<double>(acc);
  }
  return w;
}

// Multiplies each sample by gamma_w = sigma_X^2 / (sigma_X^2 + sigma_W^2).
// Sites where both powers vanish pass through unchanged.
inline std::vector<double> WienerPostfilter(std::span<const double> y, const SiteModel& model,
                                            std::span<const double> sigma_w_sq) {
  RequireSameLength(y.size(), model.size(), "WienerPostfilter");
  RequireSameLength(y.size(), sigma_w_sq.size(), "WienerPostfilter");
  std::vector<double> out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (sigma_w_sq[i] < 0.0) throw std::invalid_argument("WienerPostfilter: sigma_w_sq < 0");
    const double sx2 = model.variance(i);
    const double total = sx2 + sigma_w_sq[i];
    if (total > 0.0) out[i] *= sx2 / total;
  }
  return out;
}

inline std::vector<double> Embed(std::span<const double> x, const EmbeddingPlan& plan,
                                 const SiteModel& model) {
  RequireSameLength(x.size(), plan.alpha.size(), "Embed");
  RequireSameLength(x.size(), model.size(), "Embed");
  std::vector<double> y = Watermark(plan);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
  if (plan.postfilter) return WienerPostfilter(y, model, WatermarkPower(plan.alpha, plan.n()));
  return y;
}

// Expected weighted embedding distortion D_xy.
//   no post-filter: sum phi^2 n alpha^2
//   post-filter:    sum phi^2 sigma_X^2 sigma_W^2 / (sigma_X^2 + sigma_W^2)
inline double EmbeddingDistortion(std::span<const double> alpha, std::size_t n,
                                  const SiteModel& model, bool postfilter) {
  RequireSameLength(alpha.size(), model.size(), "EmbeddingDistortion");
  CompensatedSum acc;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double w2 = static_cast<double>(n) * alpha[i] * alpha[i];
    const double phi2 = model.phi[i] * model.phi[i];
    if (!postfilter) {
      acc.Add(phi2 * w2);
    } else if (w2 > 0.0) {
      const double sx2 = model.variance(i);
      acc.Add(phi2 * sx2 * w2 / (sx2 + w2));
    }
  }
  return acc.Value();
}

inline double EmbeddingDistortion(const EmbeddingPlan& plan, const SiteModel& model) {
  return EmbeddingDistortion(plan.alpha, plan.n(), model, plan.postfilter);
}

// sum phi_i^2 (a_i - b_i)^2
inline double EmpiricalWeightedMse(std::span<const double> a, std::span<const double> b,
                                   std::span<const double> phi) {
  RequireSameLength(a.size(), b.size(), "EmpiricalWeightedMse");
  RequireSameLength(a.size(), phi.size(), "EmpiricalWeightedMse");
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc.Add(phi[i] * phi[i] * d * d);
  }
  return acc.Value();
}

}  // namespace sslab
