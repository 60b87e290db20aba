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

// Brute-force ground truth for the closed forms: grid searches over the
// attacker's and hider's parameters, and a Monte Carlo channel simulator.
//
// The attack objective is re-implemented here from its definition rather than
// taken from attack.hpp, so agreement is an independent check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sslab/attack.hpp"
#include "sslab/embedder.hpp"
#include "sslab/extractor.hpp"
#include "sslab/numeric.hpp"
#include "sslab/rng.hpp"
#include "sslab/signal_model.hpp"

namespace sslab::oracle {

// J_lambda,i(gamma, s) straight from its definition. A site the attacker
// scales to zero carries no watermark energy.
inline double AttackObjective(double gamma, double sdq, double alpha, double sigma_x,
                              double phi, double lambda, std::size_t n) {
  const double sx2 = sigma_x * sigma_x;
  const double a2 = alpha * alpha;
  const double nd = static_cast<double>(n);
  double rho = 0.0;
  if (gamma * alpha != 0.0) {
    const double v = gamma * gamma * (sx2 + a2 * (nd - 1.0)) + sdq;
    rho = a2 * gamma * gamma / v;
  }
  const double dist = sx2 * (1.0 - gamma) * (1.0 - gamma) + nd * gamma * gamma * a2 + sdq;
  return rho + lambda * phi * phi * dist;
}

// The sigma_delta^2 axis is sampled on a squared scale,
// s_k = lo + (hi - lo) t_k^2 with t uniform, which packs points near zero
// where the optimal noise power usually sits.
struct GridSpec {
  double gamma_lo = 0.0;
  double gamma_hi = 1.0;
  std::size_t gamma_points = 400;
  double sdq_lo = 0.0;
  double sdq_hi = 1.0;
  std::size_t sdq_points = 400;
  int refine_rounds = 3;

  // Default search box: gamma in [0, 2 gamma_w], sigma_delta^2 in [0, 4 sigma_X^2].
  static GridSpec ForSite(double alpha, double sigma_x, std::size_t n,
                          std::size_t points = 400, int refine_rounds = 3) {
    GridSpec g;
    const double sx2 = sigma_x * sigma_x;
    const double w2 = static_cast<double>(n) * alpha * alpha;
    const double gw = sx2 + w2 > 0.0 ? sx2 / (sx2 + w2) : 1.0;
    g.gamma_hi = gw > 0.0 ? 2.0 * gw : 1.0;
    g.sdq_hi = sx2 > 0.0 ? 4.0 * sx2 : 1.0;
    g.gamma_points = g.sdq_points = points;
    g.refine_rounds = refine_rounds;
    return g;
  }

  void Validate() const {
    if (!(gamma_lo <= gamma_hi) || !(sdq_lo <= sdq_hi)) {
      throw std::invalid_argument("GridSpec: lo must not exceed hi");
    }
    if (gamma_points < 2 || sdq_points < 2) throw std::invalid_argument("GridSpec: counts must be >= 2");
    if (refine_rounds < 0) throw std::invalid_argument("GridSpec: refine_rounds must be >= 0");
    if (gamma_lo < 0.0 || sdq_lo < 0.0) throw std::invalid_argument("GridSpec: ranges must be >= 0");
  }
};

struct GridAttackResult {
  double gamma = 0.0;
  double sigma_delta_sq = 0.0;
  double cost = 0.0;
  std::vector<double> round_costs;  // incumbent after each round
};

inline GridAttackResult GridAttackSearch(double alpha, double sigma_x, double phi, double lambda,
                                         std::size_t n, const GridSpec& spec) {
  spec.Validate();
  const double t_span = spec.sdq_hi - spec.sdq_lo;
  double g_lo = spec.gamma_lo, g_hi = spec.gamma_hi;
  double t_lo = 0.0, t_hi = 1.0;
  GridAttackResult best;
  double best_t = 0.0;
  best.cost = std::numeric_limits<double>::infinity();
  for (int round = 0; round <= spec.refine_rounds; ++round) {
    const double g_step = (g_hi - g_lo) / static_cast<double>(spec.gamma_points - 1);
    const double t_step = (t_hi - t_lo) / static_cast<double>(spec.sdq_points - 1);
    for (std::size_t a = 0; a < spec.gamma_points; ++a) {
      const double g = g_lo + g_step * static_cast<double>(a);
      for (std::size_t b = 0; b < spec.sdq_points; ++b) {
        const double t = t_lo + t_step * static_cast<double>(b);
        const double s = spec.sdq_lo + t_span * t * t;
        const double j = AttackObjective(g, s, alpha, sigma_x, phi, lambda, n);
        if (j < best.cost) {
          best.cost = j;
          best.gamma = g;
          best.sigma_delta_sq = s;
          best_t = t;
        }
      }
    }
    best.round_costs.push_back(best.cost);
    // Zoom 10x around the incumbent, clipped to the original box.
    const double g_half = (g_hi - g_lo) / 20.0;
    const double t_half = (t_hi - t_lo) / 20.0;
    g_lo = std::max(spec.gamma_lo, best.gamma - g_half);
    g_hi = std::min(spec.gamma_hi, best.gamma + g_half);
    t_lo = std::max(0.0, best_t - t_half);
    t_hi = std::min(1.0, best_t + t_half);
  }
  return best;
}

// Proof that the closed-form attacker agreed with the grid in this run.
// Only ValidateClosedFormAttack can produce one.
class ClosedFormAttackCertificate {
 public:
  std::size_t cases() const { return cases_; }
  double worst_gap() const { return worst_gap_; }

 private:
  friend struct AttackValidation;
  ClosedFormAttackCertificate(std::size_t cases, double worst) : cases_(cases), worst_gap_(worst) {}
  std::size_t cases_;
  double worst_gap_;
};

struct AttackCase {
  double alpha;
  double sigma_x;
  double phi;
  double lambda;
  std::size_t n;
};

struct AttackCaseResult {
  AttackCase params;
  Regime regime;
  double closed_cost;
  double grid_cost;
  double gap;  // |closed - grid| / grid
};

// Domain geometry for drawing test sites. Computed here with a plain scan and
// bisection so case generation does not lean on the solver.
struct HiderProbe {
  double sigma_x;
  double phi;
  double lambda;
  std::size_t n;

  double Mu() const { return std::sqrt(lambda) * phi * sigma_x * sigma_x; }

  // Smallest alpha in (0, mu] where (alpha - mu)(sigma_X^2 + n alpha^2) + mu alpha^2
  // turns non-negative.
  double D2Boundary() const {
    const double mu = Mu();
    const double sx2 = sigma_x * sigma_x;
    const double nd = static_cast<double>(n);
    auto f = [&](double a) { return (a - mu) * (sx2 + nd * a * a) + mu * a * a; };
    constexpr int kScan = 256;
    double lo = 0.0;
    for (int k = 1; k <= kScan; ++k) {
      const double hi = mu * k / kScan;
      if (f(hi) >= 0.0) return Bisect(f, lo, hi, 1e-15 * mu);
      lo = hi;
    }
    return mu;
  }
};

// Random sites covering the three domains in rotation (D1, D2, D3).
inline std::vector<AttackCase> RandomAttackCases(std::size_t count, std::uint64_t seed) {
  std::vector<AttackCase> cases;
  cases.reserve(count);
  auto u = [&](std::uint64_t k) { return CounterUniform(seed, Stream::kOracle, k); };
  auto log_uniform = [](double t, double lo, double hi) {
    return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  };
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint64_t k = 8 * c;
    AttackCase p;
    p.sigma_x = log_uniform(u(k), 0.2, 5.0);
    p.phi = 0.2 + 0.8 * u(k + 1);
    p.lambda = log_uniform(u(k + 2), 1e-3, 10.0);
    p.n = 1 + static_cast<std::size_t>(u(k + 3) * 199.0);
    const HiderProbe probe{p.sigma_x, p.phi, p.lambda, p.n};
    const double mu = probe.Mu();
    const double boundary = probe.D2Boundary();
    switch (c % 3) {
      case 0:
        p.alpha = mu * log_uniform(u(k + 4), 1.0001, 3.0);
        break;
      case 1:
        p.alpha = boundary + (mu - boundary) * u(k + 4);
        break;
      default:
        p.alpha = boundary * (0.02 + 0.98 * u(k + 4));
        break;
    }
    cases.push_back(p);
  }
  return cases;
}

struct AttackValidation {
  std::vector<AttackCaseResult> results;
  double worst_gap = 0.0;
  bool passed = false;

  std::optional<ClosedFormAttackCertificate> Certificate() const {
    if (!passed) return std::nullopt;
    return ClosedFormAttackCertificate(results.size(), worst_gap);
  }
};

inline AttackValidation ValidateClosedFormAttack(std::span<const AttackCase> cases,
                                                 double tolerance, std::size_t points = 400,
                                                 int refine_rounds = 3) {
  AttackValidation v;
  v.passed = true;
  for (const auto& c : cases) {
    const SiteState s{c.alpha, c.sigma_x, c.phi, c.lambda, c.n};
    const SiteAttack closed = OptimalSiteAttack(s);
    const auto grid = GridAttackSearch(c.alpha, c.sigma_x, c.phi, c.lambda, c.n,
                                       GridSpec::ForSite(c.alpha, c.sigma_x, c.n, points,
                                                         refine_rounds));
    const double gap = RelativeGap(closed.cost, grid.cost);
    v.results.push_back({c, closed.regime, closed.cost, grid.cost, gap});
    v.worst_gap = std::max(v.worst_gap, gap);
    if (!(gap <= tolerance)) v.passed = false;
  }
  return v;
}

struct GridAlphaResult {
  double alpha = 0.0;
  double payoff = 0.0;
};

// Maximizes J_chi,i over alpha in [0, 3 mu] on a uniform grid, then zooms
// `refine_rounds` times onto +/- 2 cells around the incumbent. Without a
// certificate each grid alpha gets its own grid attack search (slow); with
// one, the validated closed-form best response is used.
inline GridAlphaResult GridAlphaSearch(double lambda, double chi, double phi, double sigma_x,
                                       std::size_t n, std::size_t points, int refine_rounds = 3,
                                       const ClosedFormAttackCertificate* certificate = nullptr,
                                       std::size_t attack_grid_points = 400) {
  if (points < 2) throw std::invalid_argument("GridAlphaSearch: need at least 2 points");
  if (refine_rounds < 0) throw std::invalid_argument("GridAlphaSearch: refine_rounds must be >= 0");
  const double mu = std::sqrt(lambda) * phi * sigma_x * sigma_x;
  const double penalty = chi * static_cast<double>(n) * phi * phi;
  auto payoff_at = [&](double alpha) {
    double response = 0.0;
    if (certificate != nullptr) {
      response = OptimalSiteAttack({alpha, sigma_x, phi, lambda, n}).cost;
    } else {
      response = GridAttackSearch(alpha, sigma_x, phi, lambda, n,
                                  GridSpec::ForSite(alpha, sigma_x, n, attack_grid_points))
                     .cost;
    }
    return response - penalty * alpha * alpha;
  };
  GridAlphaResult best;
  best.payoff = -std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 3.0 * mu;
  for (int round = 0; round <= refine_rounds; ++round) {
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) {
      const double alpha = lo + step * static_cast<double>(k);
      const double p = payoff_at(alpha);
      if (p > best.payoff) {
        best.payoff = p;
        best.alpha = alpha;
      }
    }
    lo = std::max(0.0, best.alpha - 2.0 * step);
    hi = std::min(3.0 * mu, best.alpha + 2.0 * step);
    if (!(hi > lo)) break;
  }
  return best;
}

struct HiderCase {
  double lambda;
  double chi;
  double phi;
  double sigma_x;
  std::size_t n;
};

inline std::vector<HiderCase> RandomHiderCases(std::size_t count, std::uint64_t seed) {
  std::vector<HiderCase> cases;
  cases.reserve(count);
  const std::uint64_t child = SubSeed(seed, Stream::kOracle, 1);
  auto u = [&](std::uint64_t k) { return CounterUniform(child, Stream::kOracle, k); };
  auto log_uniform = [](double t, double lo, double hi) {
    return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  };
  for (std::size_t c = 0; c < count; ++c) {
    const std::uint64_t k = 8 * c;
    HiderCase h;
    h.sigma_x = log_uniform(u(k), 0.2, 10.0);
    h.phi = 0.2 + 0.8 * u(k + 1);
    h.lambda = log_uniform(u(k + 2), 1e-3, 10.0);
    h.chi = log_uniform(u(k + 3), 1e-4, 10.0);
    h.n = 1 + static_cast<std::size_t>(u(k + 4) * 199.0);
    cases.push_back(h);
  }
  return cases;
}

// ---------------------------------------------------------------------------
// Monte Carlo channel statistics.

struct MonteCarloOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool fresh_code_per_trial = true;  // averages inter-bit interference
  bool keep_residuals = false;
};

struct MonteCarloStats {
  std::size_t trials = 0;
  std::vector<double> mean_soft;      // per bit
  std::vector<double> var_soft;       // per bit, unbiased sample variance
  std::vector<double> stderr_mean;    // per bit
  double pooled_var = 0.0;            // of (bhat_j - b_j) over bits and trials
  double mean_decoder_sigma_b_sq = 0.0;
  double ber = 0.0;
  std::size_t bit_errors = 0;
  std::vector<double> residuals;      // (bhat - b), when kept
};

inline MonteCarloStats MonteCarloChannel(const SiteModel& model, const EmbeddingPlan& embed,
                                         const AttackPlan& attack,
                                         const ChannelAssumption& assumption,
                                         const MonteCarloOptions& opt) {
  model.Validate();
  embed.Validate();
  RequireSameLength(model.size(), embed.alpha.size(), "MonteCarloChannel");
  RequireSameLength(model.size(), attack.size(), "MonteCarloChannel");
  if (opt.trials < 2) throw std::invalid_argument("MonteCarloChannel: need at least 2 trials");
  const std::size_t m = model.size();
  const std::size_t n = embed.n();
  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  double pooled = 0.0;
  double decoder_var = 0.0;
  MonteCarloStats st;
  st.trials = opt.trials;
  if (opt.keep_residuals) st.residuals.reserve(opt.trials * n);
  std::vector<double> x(m);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::uint64_t trial_seed = SubSeed(opt.seed, Stream::kTrial, t);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = model.sigma_x[i] * CounterGaussian(trial_seed, Stream::kHost, i);
    }
    EmbeddingPlan plan = embed;
    if (opt.fresh_code_per_trial) plan.code_seed = SubSeed(trial_seed, Stream::kCode, 0);
    AttackPlan channel = attack;
    channel.noise_seed = SubSeed(trial_seed, Stream::kNoise, 0);
    const auto y = Embed(x, plan, model);
    const auto y_prime = ApplyAttack(y, channel);
    const auto report = MapDecode(y_prime, plan.code(), assumption, plan.message);
    decoder_var += report.sigma_b_sq;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = report.soft[j] - plan.message.bits[j];
      sum[j] += r;
      sum_sq[j] += r * r;
      if (opt.keep_residuals) st.residuals.push_back(r);
      if (report.hard[j] != plan.message.bits[j]) ++st.bit_errors;
    }
  }
  const double T = static_cast<double>(opt.trials);
  st.mean_soft.resize(n);
  st.var_soft.resize(n);
  st.stderr_mean.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double mean_r = sum[j] / T;
    st.mean_soft[j] = embed.message.bits[j] + mean_r;
    st.var_soft[j] = (sum_sq[j] - T * mean_r * mean_r) / (T - 1.0);
    st.stderr_mean[j] = std::sqrt(st.var_soft[j] / T);
    pooled += st.var_soft[j];
  }
  st.pooled_var = pooled / static_cast<double>(n);
  st.mean_decoder_sigma_b_sq = decoder_var / T;
  st.ber = static_cast<double>(st.bit_errors) / (T * static_cast<double>(n));
  return st;
}

}  // namespace sslab::oracle
