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

// The hider's side of the game: per-site embedding strength alpha* that
// maximizes J_chi,i(alpha) = J_lambda,i(best attack) - chi n phi^2 alpha^2, and
// calibration of (lambda, chi) to distortion budgets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sslab/attack.hpp"
#include "sslab/embedder.hpp"
#include "sslab/extractor.hpp"
#include "sslab/numeric.hpp"
#include "sslab/signal_model.hpp"

namespace sslab {

// How the Wiener-regime candidate is produced.
//   kClosedForm: the closed form derived under sigma_W^2 ~ alpha^2 (n-1).
//   kExact:      additionally offer the exact stationary point of the Wiener
//                payoff, so the selected alpha attains the true game value
//                even at small n where the approximation is coarse.
enum class WienerBranch { kClosedForm, kExact };

inline WienerBranch ParseWienerBranch(const std::string& text) {
  if (text == "closed-form" || text == "closed_form") return WienerBranch::kClosedForm;
  if (text == "exact") return WienerBranch::kExact;
  throw std::invalid_argument("unknown wiener branch '" + text + "'");
}

inline std::string ToString(WienerBranch b) {
  return b == WienerBranch::kExact ? "exact" : "closed-form";
}

// One site as seen by the hider.
struct HiderSite {
  double lambda;
  double chi;
  double phi;
  double sigma_x;
  std::size_t n;

  double sx2() const { return sigma_x * sigma_x; }
  double nd() const { return static_cast<double>(n); }
  double mu() const { return std::sqrt(lambda) * phi * sx2(); }
  SiteState AtAlpha(double alpha) const { return {alpha, sigma_x, phi, lambda, n}; }
};

inline double AlphaErase(double lambda, double phi, double sigma_x) {
  return std::sqrt(lambda) * phi * sigma_x * sigma_x;
}

inline double AlphaPostfilter(double lambda, double phi, double sigma_x) {
  return AlphaErase(lambda, phi, sigma_x);
}

struct IntermediateAlpha {
  double alpha = 0.0;
  double quartic_root = 0.0;
  bool boundary_fallback = false;  // true when the quartic root fell in D3
};

// p(alpha) = mu^2 - mu alpha - chi n phi^2 alpha^4, strictly decreasing on
// alpha >= 0 with p(0) = mu^2 > 0 and p(mu) < 0.
inline double StationaryQuartic(const HiderSite& s, double alpha) {
  const double mu = s.mu();
  const double a2 = alpha * alpha;
  return mu * mu - mu * alpha - s.chi * s.nd() * s.phi * s.phi * a2 * a2;
}

// (alpha - mu)(sigma_X^2 + n alpha^2) + mu alpha^2: >= 0 inside D2, < 0 in D3.
inline double D2BoundaryFunction(const HiderSite& s, double alpha) {
  const double mu = s.mu();
  return (alpha - mu) * (s.sx2() + s.nd() * alpha * alpha) + mu * alpha * alpha;
}

namespace detail {
// Bisection to full double resolution (the bracket stops shrinking). Returns
// the bracket end with the smaller |f|.
template <typename F>
double BisectToResolution(F&& f, double lo, double hi) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}
}  // namespace detail

inline IntermediateAlpha AlphaIntermediate(const HiderSite& s) {
  IntermediateAlpha out;
  const double mu = s.mu();
  if (!(mu > 0.0)) return out;
  out.quartic_root =
      detail::BisectToResolution([&](double a) { return StationaryQuartic(s, a); }, 0.0, mu);
  out.alpha = out.quartic_root;
  if (D2BoundaryFunction(s, out.quartic_root) >= 0.0) return out;
  // The payoff decreases on D2 to the right of the root, so the best D2 point
  // is the first D2/D3 crossing above it. The boundary function is a cubic
  // that can cross more than once; split [root, mu] at its critical points so
  // that each piece is monotone, then bisect the first piece that crosses.
  out.boundary_fallback = true;
  const double nd = s.nd();
  const double b = 2.0 * mu * (1.0 - nd);
  const double disc = b * b - 12.0 * nd * s.sx2();
  std::array<double, 4> knots{out.quartic_root, mu, mu, mu};
  std::size_t count = 2;
  if (disc > 0.0) {
    for (double c : {(-b - std::sqrt(disc)) / (6.0 * nd), (-b + std::sqrt(disc)) / (6.0 * nd)}) {
      if (c > out.quartic_root && c < mu) knots[count++] = c;
    }
  }
  std::sort(knots.begin(), knots.begin() + static_cast<std::ptrdiff_t>(count));
  auto inside = [&](double a) { return D2BoundaryFunction(s, a) >= 0.0 ? 1.0 : -1.0; };
  for (std::size_t k = 1; k < count; ++k) {
    const double lo = knots[k - 1];
    const double hi = knots[k];
    if (inside(hi) > 0.0) {
      out.alpha = detail::BisectToResolution(inside, lo, hi);
      // Land on the D2 side so the attacker's regime is well defined.
      while (inside(out.alpha) < 0.0 && out.alpha < hi) out.alpha = std::nextafter(out.alpha, hi);
      return out;
    }
  }
  out.alpha = mu;
  return out;
}

inline double AlphaIntermediate(double lambda, double chi, double phi, double sigma_x,
                                std::size_t n) {
  return AlphaIntermediate(HiderSite{lambda, chi, phi, sigma_x, n}).alpha;
}

// alpha* = sqrt((sigma_X sqrt(1 + lambda' phi^2 sigma_X^2) - sqrt(chi') phi sigma_X^2)
//               / (sqrt(chi') n phi)),  lambda' = n lambda, chi' = n chi.
// Returns 0 when the numerator is not positive: the site cannot be marked
// robustly.
inline double AlphaWiener(const HiderSite& s) {
  const double lp = s.nd() * s.lambda;
  const double cp = s.nd() * s.chi;
  const double sx2 = s.sx2();
  const double numer = s.sigma_x * std::sqrt(1.0 + lp * s.phi * s.phi * sx2) -
                       std::sqrt(cp) * s.phi * sx2;
  if (!(numer > 0.0)) return 0.0;
  return std::sqrt(numer / (std::sqrt(cp) * s.nd() * s.phi));
}

inline double AlphaWiener(double lambda, double chi, double phi, double sigma_x, std::size_t n) {
  return AlphaWiener(HiderSite{lambda, chi, phi, sigma_x, n});
}

// Stationary point of the exact Wiener payoff
//   a/(sigma_X^2 + a(n-1)) + lambda n phi^2 sigma_X^2 a/(sigma_X^2 + n a) - chi n phi^2 a
// in a = alpha^2, searched on [0, mu^2] (the Wiener domain lies below mu).
// The derivative in a is strictly decreasing, so the root is unique.
inline double AlphaWienerExact(const HiderSite& s) {
  const double mu = s.mu();
  if (!(mu > 0.0)) return 0.0;
  const double sx2 = s.sx2();
  const double nd = s.nd();
  const double phi2 = s.phi * s.phi;
  auto slope = [&](double a) {
    const double d1 = sx2 + a * (nd - 1.0);
    const double d2 = sx2 + nd * a;
    return sx2 / (d1 * d1) + s.lambda * nd * phi2 * sx2 * sx2 / (d2 * d2) - s.chi * nd * phi2;
  };
  if (slope(0.0) <= 0.0) return 0.0;
  if (slope(mu * mu) >= 0.0) return mu;
  return std::sqrt(detail::BisectToResolution(slope, 0.0, mu * mu));
}

// J_lambda,i under the attacker's best response, minus chi n phi^2 alpha^2.
inline double SitePayoff(const HiderSite& s, double alpha) {
  const SiteAttack attack = OptimalSiteAttack(s.AtAlpha(alpha));
  return attack.cost - s.chi * s.nd() * s.phi * s.phi * alpha * alpha;
}

struct AlphaChoice {
  double alpha = 0.0;
  Regime regime = Regime::kWiener;  // attacker's best response at alpha
  double payoff = 0.0;
};

inline AlphaChoice OptimalAlpha(const HiderSite& s, bool postfilter,
                                WienerBranch branch = WienerBranch::kClosedForm) {
  AlphaChoice best;
  if (postfilter) {
    best.alpha = AlphaPostfilter(s.lambda, s.phi, s.sigma_x);
    best.regime = OptimalSiteAttack(s.AtAlpha(best.alpha)).regime;
    best.payoff = SitePayoff(s, best.alpha);
    return best;
  }
  std::array<double, 5> cand{0.0, AlphaErase(s.lambda, s.phi, s.sigma_x),
                             AlphaIntermediate(s).alpha, AlphaWiener(s), 0.0};
  const std::size_t count = branch == WienerBranch::kExact ? 5 : 4;
  if (branch == WienerBranch::kExact) cand[4] = AlphaWienerExact(s);
  std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(count));
  best.payoff = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const double p = SitePayoff(s, cand[k]);
    if (p > best.payoff) {  // strict: ties keep the smaller alpha
      best.payoff = p;
      best.alpha = cand[k];
    }
  }
  best.regime = OptimalSiteAttack(s.AtAlpha(best.alpha)).regime;
  return best;
}

inline AlphaChoice OptimalAlpha(double lambda, double chi, double phi, double sigma_x,
                                std::size_t n, bool postfilter,
                                WienerBranch branch = WienerBranch::kClosedForm) {
  return OptimalAlpha(HiderSite{lambda, chi, phi, sigma_x, n}, postfilter, branch);
}

struct EquilibriumReport {
  std::vector<Regime> regime;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> sigma_delta_sq;
  std::vector<double> rho;
  double d_xy = 0.0;
  double d_xy_prime = 0.0;
  double eb_n0 = 0.0;
  double lambda = 0.0;
  double chi = 0.0;
  std::size_t n = 1;
  bool postfilter = false;

  std::size_t size() const { return alpha.size(); }

  AttackPlan Attack(std::uint64_t noise_seed = 0) const {
    AttackPlan plan;
    plan.gamma = gamma;
    plan.sigma_delta.resize(size());
    for (std::size_t i = 0; i < size(); ++i) plan.sigma_delta[i] = std::sqrt(sigma_delta_sq[i]);
    plan.regime = regime;
    plan.noise_seed = noise_seed;
    return plan;
  }
};

// Fills the report for a given alpha vector against the attacker's best
// response at `lambda`. With a post-filter the attacker faces the filtered
// signal; since the filter is an invertible per-site gain, the attacker's
// overall gain on the unfiltered signal solves the same per-site problem, and
// that overall gain is what is reported.
inline EquilibriumReport AssembleReport(std::span<const double> alpha, const SiteModel& model,
                                        std::size_t n, double lambda, double chi,
                                        bool postfilter) {
  RequireSameLength(alpha.size(), model.size(), "AssembleReport");
  EquilibriumReport r;
  r.lambda = lambda;
  r.chi = chi;
  r.n = n;
  r.postfilter = postfilter;
  r.alpha.assign(alpha.begin(), alpha.end());
  const AttackPlan plan = OptimalAttack(alpha, model, lambda, n);
  r.regime = plan.regime;
  r.gamma = plan.gamma;
  r.sigma_delta_sq.resize(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    r.sigma_delta_sq[i] = plan.sigma_delta[i] * plan.sigma_delta[i];
  }
  r.d_xy = EmbeddingDistortion(alpha, n, model, postfilter);
  r.d_xy_prime = ExpectedAttackDistortion(plan, alpha, model, n);
  bool any = false;
  for (std::size_t i = 0; i < alpha.size(); ++i) any = any || plan.gamma[i] * alpha[i] > 0.0;
  if (any) {
    r.rho = SiteRho(ChannelAssumption::Matched(alpha, model, n, plan));
  } else {
    r.rho.assign(alpha.size(), 0.0);
  }
  r.eb_n0 = Sum(r.rho);
  return r;
}

inline std::vector<double> OptimalAlphaVector(const SiteModel& model, std::size_t n,
                                              double lambda, double chi, bool postfilter,
                                              WienerBranch branch = WienerBranch::kClosedForm) {
  std::vector<double> alpha(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    alpha[i] = OptimalAlpha(HiderSite{lambda, chi, model.phi[i], model.sigma_x[i], n},
                            postfilter, branch)
                   .alpha;
  }
  return alpha;
}

inline EquilibriumReport SolveEquilibrium(const SiteModel& model, std::size_t n, double lambda,
                                          double chi, bool postfilter,
                                          WienerBranch branch = WienerBranch::kClosedForm) {
  GameParams{lambda, chi, n}.Validate();
  return AssembleReport(OptimalAlphaVector(model, n, lambda, chi, postfilter, branch), model, n,
                        lambda, chi, postfilter);
}

// ---------------------------------------------------------------------------
// Calibration of the multipliers to distortion budgets.

struct CalibrationOptions {
  double scan_lo = 1e-8;
  double scan_hi = 1e4;
  int scan_points_per_decade = 1;
  double rel_tol = 1e-3;
  int max_iter = 200;
  WienerBranch branch = WienerBranch::kClosedForm;
};

struct CalibrationResult {
  bool feasible = false;
  EquilibriumReport report;
  // Achievable range of the quantity whose target could not be bracketed.
  double achievable_lo = 0.0;
  double achievable_hi = 0.0;
  std::string message;
  std::vector<std::string> notes;  // e.g. monotonicity fallbacks
  int evaluations = 0;
};

namespace detail {

struct ScanPoint {
  double x;
  double value;
};

struct Root1D {
  bool found = false;
  double x = 0.0;
  double value = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
};

// Solves value(x) = target for x in [lo, hi] on a log scale. The value is
// expected to be monotone in x (direction detected from the scan). A scan
// that violates monotonicity switches to golden-section minimization of
// |log(value/target)| in the bracketing cell and records a note.
template <typename F>
Root1D SolveLogScale(F&& value_at, double target, const CalibrationOptions& opt,
                     std::vector<std::string>& notes, const char* what) {
  Root1D out;
  const double llo = std::log10(opt.scan_lo);
  const double lhi = std::log10(opt.scan_hi);
  const int cells = std::max(1, static_cast<int>(std::lround((lhi - llo) *
                                                             opt.scan_points_per_decade)));
  std::vector<ScanPoint> scan;
  for (int k = 0; k <= cells; ++k) {
    const double x = std::pow(10.0, llo + (lhi - llo) * k / cells);
    const double v = value_at(x);
    if (std::isfinite(v)) scan.push_back({x, v});
  }
  if (scan.empty()) return out;
  out.range_lo = out.range_hi = scan.front().value;
  for (const auto& p : scan) {
    out.range_lo = std::min(out.range_lo, p.value);
    out.range_hi = std::max(out.range_hi, p.value);
  }
  auto close_enough = [&](double v) { return std::abs(v - target) <= opt.rel_tol * target; };
  for (const auto& p : scan) {
    if (close_enough(p.value)) {
      out.found = true;
      out.x = p.x;
      out.value = p.value;
      return out;
    }
  }
  const bool increasing = scan.back().value >= scan.front().value;
  bool monotone = true;
  for (std::size_t k = 1; k < scan.size(); ++k) {
    const double step = scan[k].value - scan[k - 1].value;
    const double slack = 1e-12 * std::max(std::abs(scan[k].value), std::abs(scan[k - 1].value));
    if (increasing ? step < -slack : step > slack) monotone = false;
  }
  std::size_t cell = scan.size();
  for (std::size_t k = 1; k < scan.size(); ++k) {
    const bool below0 = scan[k - 1].value < target;
    const bool below1 = scan[k].value < target;
    if (below0 != below1) {
      cell = k;
      break;
    }
  }
  if (cell == scan.size()) return out;

  double a = std::log(scan[cell - 1].x);
  double b = std::log(scan[cell].x);
  if (monotone) {
    const bool a_below = scan[cell - 1].value < target;
    for (int it = 0; it < opt.max_iter; ++it) {
      const double mid = 0.5 * (a + b);
      const double v = value_at(std::exp(mid));
      if (close_enough(v)) {
        out.found = true;
        out.x = std::exp(mid);
        out.value = v;
        return out;
      }
      if ((v < target) == a_below) {
        a = mid;
      } else {
        b = mid;
      }
    }
    out.x = std::exp(0.5 * (a + b));
    out.value = value_at(out.x);
    out.found = close_enough(out.value);
    return out;
  }

  notes.push_back(std::string(what) +
                  ": sampled values are not monotone; using golden-section search");
  auto miss = [&](double lx) {
    const double v = value_at(std::exp(lx));
    return std::abs(std::log(std::max(v, 1e-300) / target));
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = miss(c);
  double fd = miss(d);
  for (int it = 0; it < opt.max_iter && b - a > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = miss(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = miss(d);
    }
    if (std::min(fc, fd) < std::log1p(opt.rel_tol) * 0.5) break;
  }
  out.x = std::exp(fc < fd ? c : d);
  out.value = value_at(out.x);
  out.found = close_enough(out.value);
  return out;
}

}  // namespace detail

// Finds chi so that D_xy(equilibrium) = d_xy_max at a fixed lambda.
inline CalibrationResult CalibrateChi(const SiteModel& model, std::size_t n, double lambda,
                                      double d_xy_max, const CalibrationOptions& opt = {}) {
  if (!(d_xy_max > 0.0)) throw std::invalid_argument("CalibrateChi: budget must be > 0");
  CalibrationResult res;
  auto dxy = [&](double chi) {
    ++res.evaluations;
    return EmbeddingDistortion(OptimalAlphaVector(model, n, lambda, chi, false, opt.branch), n,
                               model, false);
  };
  const auto root = detail::SolveLogScale(dxy, d_xy_max, opt, res.notes, "chi");
  res.achievable_lo = root.range_lo;
  res.achievable_hi = root.range_hi;
  if (!root.found) {
    res.message = "D_xy budget not reachable over the chi scan; achievable range [" +
                  std::to_string(root.range_lo) + ", " + std::to_string(root.range_hi) + "]";
    return res;
  }
  res.feasible = true;
  res.report = SolveEquilibrium(model, n, lambda, root.x, false, opt.branch);
  return res;
}

// Nested search: outer on lambda for D_xy' = d_xy_prime_max, inner on chi for
// D_xy = d_xy_max. With a post-filter alpha* does not depend on chi, so lambda
// alone is set from the D_xy budget and D_xy' is whatever follows.
inline CalibrationResult CalibrateMultipliers(const SiteModel& model, std::size_t n,
                                              double d_xy_max, double d_xy_prime_max,
                                              bool postfilter,
                                              const CalibrationOptions& opt = {}) {
  model.Validate();
  if (!(d_xy_max > 0.0) || !(d_xy_prime_max > 0.0)) {
    throw std::invalid_argument("CalibrateMultipliers: budgets must be > 0");
  }
  CalibrationResult res;
  if (postfilter) {
    auto dxy = [&](double lambda) {
      ++res.evaluations;
      return EmbeddingDistortion(OptimalAlphaVector(model, n, lambda, 1.0, true), n, model, true);
    };
    const auto root = detail::SolveLogScale(dxy, d_xy_max, opt, res.notes, "lambda");
    res.achievable_lo = root.range_lo;
    res.achievable_hi = root.range_hi;
    if (!root.found) {
      res.message = "D_xy budget not reachable over the lambda scan";
      return res;
    }
    res.feasible = true;
    res.report = SolveEquilibrium(model, n, root.x, 1.0, true);
    res.notes.push_back("post-filter: chi does not enter alpha*; D_xy' is not controlled");
    return res;
  }

  auto dxy_prime = [&](double lambda) {
    CalibrationResult inner = CalibrateChi(model, n, lambda, d_xy_max, opt);
    res.evaluations += inner.evaluations;
    if (!inner.feasible) return std::numeric_limits<double>::quiet_NaN();
    return inner.report.d_xy_prime;
  };
  const auto root = detail::SolveLogScale(dxy_prime, d_xy_prime_max, opt, res.notes, "lambda");
  res.achievable_lo = root.range_lo;
  res.achievable_hi = root.range_hi;
  if (!root.found) {
    res.message = "D_xy' budget not reachable over the lambda scan; achievable range [" +
                  std::to_string(root.range_lo) + ", " + std::to_string(root.range_hi) + "]";
    return res;
  }
  CalibrationResult inner = CalibrateChi(model, n, root.x, d_xy_max, opt);
  res.evaluations += inner.evaluations;
  res.notes.insert(res.notes.end(), inner.notes.begin(), inner.notes.end());
  res.feasible = inner.feasible;
  res.report = inner.report;
  return res;
}

}  // namespace sslab
