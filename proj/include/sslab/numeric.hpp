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

// Small numeric helpers shared by the solver, oracle and tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslab {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      carry_ += (sum_ - t) + value;
    } else {
      carry_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double Sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.Add(v);
  return acc.Value();
}

inline double NormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Bisection for a sign change of f on [lo, hi]. f(lo) and f(hi) must have
// opposite signs (or one of them be zero). Stops when the bracket is narrower
// than `abs_tol` or after `max_iter` halvings.
inline double Bisect(const std::function<double(double)>& f, double lo,
                     double hi, double abs_tol, int max_iter = 200) {
  double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  const double f_hi = f(hi);
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw std::invalid_argument("Bisect: no sign change on bracket");
  }
  for (int it = 0; it < max_iter && hi - lo > abs_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Two-sided one-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double KsStatistic(std::vector<double> samples,
                          const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KsStatistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, f - static_cast<double>(k) / n,
                  static_cast<double>(k + 1) / n - f});
  }
  return d;
}

// Asymptotic critical value of the KS statistic at the 1% level.
inline double KsCritical1Percent(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

inline double RelativeGap(double value, double reference) {
  const double scale = std::abs(reference);
  if (scale == 0.0) return std::abs(value);
  return std::abs(value - reference) / scale;
}

inline void RequireSameLength(std::size_t a, std::size_t b,
                              const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

}  // namespace sslab
