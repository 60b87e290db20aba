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

// SAWGN attack channel y'_i = gamma_i y_i + delta_i, delta_i ~ N(0, sigma_delta_i^2),
// and the attacker's best response to a known embedding strength.
//
// Per site the attacker minimizes
//   J(gamma, s) = rho + lambda phi^2 (sigma_X^2 (1-gamma)^2 + n gamma^2 alpha^2 + s)
//   rho         = alpha^2 gamma^2 / V,   V = gamma^2 (sigma_X^2 + alpha^2 (n-1)) + s
// with s = sigma_delta^2. With mu = sqrt(lambda) phi sigma_X^2 the (alpha, sigma_X)
// plane splits into
//   D1 (mu < alpha)                                   Erase:        gamma = 0, s = 0
//   D2 ((alpha-mu)(sigma_X^2 + n alpha^2) + mu alpha^2 >= 0, otherwise)
//                                                     Intermediate: interior point
//   D3 (remaining)                                    Wiener:       gamma = gamma_w, s = 0

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslab/numeric.hpp"
#include "sslab/rng.hpp"
#include "sslab/signal_model.hpp"

namespace sslab {

enum class Regime { kErase, kWiener, kIntermediate, kCustom };

inline std::string ToString(Regime r) {
  switch (r) {
    case Regime::kErase: return "erase";
    case Regime::kWiener: return "wiener";
    case Regime::kIntermediate: return "intermediate";
    case Regime::kCustom: return "custom";
  }
  return "?";
}

// Domain label of a regime: D1 erase, D2 intermediate, D3 wiener.
inline std::string DomainLabel(Regime r) {
  switch (r) {
    case Regime::kErase: return "D1";
    case Regime::kIntermediate: return "D2";
    case Regime::kWiener: return "D3";
    case Regime::kCustom: return "custom";
  }
  return "?";
}

struct GameParams {
  double lambda = 1.0;
  double chi = 1.0;
  std::size_t n = 1;

  void Validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("GameParams: lambda must be > 0");
    if (!(chi > 0.0)) throw std::invalid_argument("GameParams: chi must be > 0");
    if (n == 0) throw std::invalid_argument("GameParams: n must be >= 1");
  }
};

// One site as seen by the attacker. sigma_x is a standard deviation.
struct SiteState {
  double alpha;
  double sigma_x;
  double phi;
  double lambda;
  std::size_t n;

  double sx2() const { return sigma_x * sigma_x; }
  double nd() const { return static_cast<double>(n); }
  double mu() const { return std::sqrt(lambda) * phi * sx2(); }
};

struct AttackPlan {
  std::vector<double> gamma;
  std::vector<double> sigma_delta;
  std::vector<Regime> regime;
  std::uint64_t noise_seed = 0;

  std::size_t size() const { return gamma.size(); }

  static AttackPlan Uniform(std::size_t m, double gamma, double sigma_delta,
                            std::uint64_t noise_seed = 0) {
    AttackPlan plan;
    plan.gamma.assign(m, gamma);
    plan.sigma_delta.assign(m, sigma_delta);
    plan.regime.assign(m, Regime::kCustom);
    plan.noise_seed = noise_seed;
    plan.Validate();
    return plan;
  }

  void Validate() const {
    RequireSameLength(gamma.size(), sigma_delta.size(), "AttackPlan");
    RequireSameLength(gamma.size(), regime.size(), "AttackPlan");
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      if (!(gamma[i] >= 0.0) || !(sigma_delta[i] >= 0.0)) {
        throw std::invalid_argument("AttackPlan: gamma and sigma_delta must be >= 0");
      }
      if (regime[i] == Regime::kErase && (gamma[i] != 0.0 || sigma_delta[i] != 0.0)) {
        throw std::invalid_argument("AttackPlan: erase site with nonzero parameters");
      }
      if (regime[i] == Regime::kWiener && sigma_delta[i] != 0.0) {
        throw std::invalid_argument("AttackPlan: wiener site with additive noise");
      }
    }
  }
};

inline std::vector<double> ApplyAttack(std::span<const double> y, const AttackPlan& plan) {
  RequireSameLength(y.size(), plan.size(), "ApplyAttack");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = plan.gamma[i] * y[i];
    if (plan.sigma_delta[i] > 0.0) {
      out[i] += plan.sigma_delta[i] * CounterGaussian(plan.noise_seed, Stream::kNoise, i);
    }
  }
  return out;
}

// y'_i = step * round(y_i / step), halves rounded away from zero.
inline std::vector<double> QuantizationAttack(std::span<const double> y, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("QuantizationAttack: step must be > 0");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = step * std::round(y[i] / step);
  return out;
}

// Expected weighted attack distortion
//   D_xy' = sum phi^2 (sigma_X^2 (1-gamma)^2 + n gamma^2 alpha^2 + sigma_delta^2).
inline double ExpectedAttackDistortion(const AttackPlan& plan, std::span<const double> alpha,
                                       const SiteModel& model, std::size_t n) {
  RequireSameLength(plan.size(), alpha.size(), "ExpectedAttackDistortion");
  RequireSameLength(plan.size(), model.size(), "ExpectedAttackDistortion");
  const double nd = static_cast<double>(n);
  CompensatedSum acc;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double g = plan.gamma[i];
    const double one_minus = 1.0 - g;
    const double terms = model.variance(i) * one_minus * one_minus +
                         nd * g * g * alpha[i] * alpha[i] +
                         plan.sigma_delta[i] * plan.sigma_delta[i];
    acc.Add(model.phi[i] * model.phi[i] * terms);
  }
  return acc.Value();
}

inline double WienerGain(double sigma_x_sq, double sigma_w_sq) {
  if (sigma_x_sq < 0.0 || sigma_w_sq < 0.0) {
    throw std::invalid_argument("WienerGain: powers must be >= 0");
  }
  if (sigma_x_sq == 0.0 && sigma_w_sq == 0.0) {
    throw std::invalid_argument("WienerGain: both powers are zero");
  }
  return sigma_x_sq / (sigma_x_sq + sigma_w_sq);
}

// Ties on either validity constraint land in D2.
inline Regime ClassifyDomain(const SiteState& s) {
  const double mu = s.mu();
  const double a = s.alpha;
  if (mu - a < 0.0) return Regime::kErase;
  const double boundary = (a - mu) * (s.sx2() + s.nd() * a * a) + mu * a * a;
  return boundary >= 0.0 ? Regime::kIntermediate : Regime::kWiener;
}

inline Regime ClassifyDomain(double alpha, double sigma_x, double phi, double lambda,
                             std::size_t n) {
  return ClassifyDomain(SiteState{alpha, sigma_x, phi, lambda, n});
}

struct SiteAttack {
  Regime regime = Regime::kWiener;
  double gamma = 1.0;
  double sigma_delta_sq = 0.0;
  double cost = 0.0;  // J_lambda,i at (gamma, sigma_delta_sq)
};

struct IntermediateParams {
  double gamma;
  double sigma_delta_sq;
};

// gamma* = (mu - alpha) / (sqrt(lambda) phi alpha^2),
// sigma_delta*^2 = gamma* (gamma_w - gamma*) (sigma_X^2 + n alpha^2).
inline IntermediateParams IntermediateAttackParams(const SiteState& s) {
  if (!(s.alpha > 0.0)) throw std::invalid_argument("IntermediateAttackParams: alpha must be > 0");
  if (ClassifyDomain(s) != Regime::kIntermediate) {
    throw std::invalid_argument("IntermediateAttackParams: site is outside D2");
  }
  const double a2 = s.alpha * s.alpha;
  const double root_lambda_phi = std::sqrt(s.lambda) * s.phi;
  const double gamma = std::max(0.0, (s.mu() - s.alpha) / (root_lambda_phi * a2));
  const double spread = s.sx2() + s.nd() * a2;
  const double gamma_w = WienerGain(s.sx2(), s.nd() * a2);
  // Boundary cases round to tiny negatives; the constraint itself holds.
  const double sdq = std::max(0.0, gamma * (gamma_w - gamma) * spread);
  return {gamma, sdq};
}

// Closed-form J_E, J_W, J_I.
inline double AttackCost(Regime regime, const SiteState& s) {
  const double sx2 = s.sx2();
  const double phi2 = s.phi * s.phi;
  const double a2 = s.alpha * s.alpha;
  switch (regime) {
    case Regime::kErase:
      return s.lambda * phi2 * sx2;
    case Regime::kWiener: {
      if (a2 == 0.0) return 0.0;
      return a2 / (sx2 + a2 * (s.nd() - 1.0)) +
             s.lambda * s.nd() * phi2 * a2 * sx2 / (sx2 + s.nd() * a2);
    }
    case Regime::kIntermediate: {
      if (!(s.alpha > 0.0)) throw std::invalid_argument("AttackCost: J_I is singular at alpha = 0");
      return 2.0 * std::sqrt(s.lambda) * s.phi * sx2 / s.alpha - 1.0 +
             s.lambda * phi2 * sx2 * (1.0 - sx2 / a2);
    }
    case Regime::kCustom:
      break;
  }
  throw std::invalid_argument("AttackCost: custom regime has no closed form");
}

inline double AttackCost(Regime regime, double alpha, double sigma_x, double phi, double lambda,
                         std::size_t n) {
  return AttackCost(regime, SiteState{alpha, sigma_x, phi, lambda, n});
}

// Best response at one site.
inline SiteAttack OptimalSiteAttack(const SiteState& s) {
  SiteAttack out;
  if (s.alpha == 0.0) {
    // Nothing embedded: leave the site alone (gamma_w = 1, zero cost).
    out.regime = Regime::kWiener;
    return out;
  }
  out.regime = ClassifyDomain(s);
  switch (out.regime) {
    case Regime::kErase:
      out.gamma = 0.0;
      break;
    case Regime::kWiener:
      out.gamma = WienerGain(s.sx2(), s.nd() * s.alpha * s.alpha);
      break;
    case Regime::kIntermediate: {
      const auto p = IntermediateAttackParams(s);
      out.gamma = p.gamma;
      out.sigma_delta_sq = p.sigma_delta_sq;
      break;
    }
    case Regime::kCustom:
      break;
  }
  out.cost = AttackCost(out.regime, s);
  return out;
}

inline AttackPlan OptimalAttack(std::span<const double> alpha, const SiteModel& model,
                                double lambda, std::size_t n, std::uint64_t noise_seed = 0) {
  RequireSameLength(alpha.size(), model.size(), "OptimalAttack");
  if (!(lambda > 0.0)) throw std::invalid_argument("OptimalAttack: lambda must be > 0");
  AttackPlan plan;
  plan.noise_seed = noise_seed;
  plan.gamma.resize(alpha.size());
  plan.sigma_delta.resize(alpha.size());
  plan.regime.resize(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const auto site = OptimalSiteAttack({alpha[i], model.sigma_x[i], model.phi[i], lambda, n});
    plan.gamma[i] = site.gamma;
    plan.sigma_delta[i] = std::sqrt(site.sigma_delta_sq);
    plan.regime[i] = site.regime;
  }
  return plan;
}

}  // namespace sslab
