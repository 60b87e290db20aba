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

// Multi-level orthonormal 2D Haar transform in the usual in-place (Mallat)
// layout. After L levels the approximation band occupies the top-left
// (rows / 2^L) x (cols / 2^L) block; everything else is detail.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sslab {

struct Subband {
  std::size_t row0, col0, rows, cols;
  int level;  // 1 = finest
};

namespace detail {
inline void HaarStep(std::span<double> data, std::size_t stride, std::size_t len,
                     std::vector<double>& tmp, bool inverse) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::size_t half = len / 2;
  tmp.resize(len);
  if (!inverse) {
    for (std::size_t k = 0; k < half; ++k) {
      const double a = data[(2 * k) * stride];
      const double b = data[(2 * k + 1) * stride];
      tmp[k] = (a + b) * r;
      tmp[half + k] = (a - b) * r;
    }
  } else {
    for (std::size_t k = 0; k < half; ++k) {
      const double s = data[k * stride];
      const double d = data[(half + k) * stride];
      tmp[2 * k] = (s + d) * r;
      tmp[2 * k + 1] = (s - d) * r;
    }
  }
  for (std::size_t k = 0; k < len; ++k) data[k * stride] = tmp[k];
}

inline void CheckHaarShape(std::size_t rows, std::size_t cols, std::size_t size, int levels) {
  if (levels < 0) throw std::invalid_argument("Haar: levels must be >= 0");
  if (rows * cols != size) throw std::invalid_argument("Haar: shape does not match data");
  const std::size_t unit = std::size_t{1} << levels;
  if (rows % unit != 0 || cols % unit != 0) {
    throw std::invalid_argument("Haar: dimensions must be divisible by 2^levels");
  }
}
}  // namespace detail

inline void HaarForward2D(std::span<double> data, std::size_t rows, std::size_t cols,
                          int levels) {
  detail::CheckHaarShape(rows, cols, data.size(), levels);
  std::vector<double> tmp;
  std::size_t r = rows, c = cols;
  for (int l = 0; l < levels; ++l) {
    for (std::size_t i = 0; i < r; ++i) detail::HaarStep(data.subspan(i * cols), 1, c, tmp, false);
    for (std::size_t j = 0; j < c; ++j) detail::HaarStep(data.subspan(j), cols, r, tmp, false);
    r /= 2;
    c /= 2;
  }
}

inline void HaarInverse2D(std::span<double> data, std::size_t rows, std::size_t cols,
                          int levels) {
  detail::CheckHaarShape(rows, cols, data.size(), levels);
  std::vector<double> tmp;
  for (int l = levels - 1; l >= 0; --l) {
    const std::size_t r = rows >> l;
    const std::size_t c = cols >> l;
    for (std::size_t j = 0; j < c; ++j) detail::HaarStep(data.subspan(j), cols, r, tmp, true);
    for (std::size_t i = 0; i < r; ++i) detail::HaarStep(data.subspan(i * cols), 1, c, tmp, true);
  }
}

// The 3 * levels detail subbands, finest first.
inline std::vector<Subband> DetailSubbands(std::size_t rows, std::size_t cols, int levels) {
  std::vector<Subband> bands;
  for (int l = 1; l <= levels; ++l) {
    const std::size_t h = rows >> l;
    const std::size_t w = cols >> l;
    bands.push_back({0, w, h, w, l});
    bands.push_back({h, 0, h, w, l});
    bands.push_back({h, w, h, w, l});
  }
  return bands;
}

}  // namespace sslab
