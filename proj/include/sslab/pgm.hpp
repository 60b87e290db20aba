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

// Binary PGM (P5) images, 8-bit.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslab {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void SkipSpaceAndComments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == EOF) return;
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline std::size_t ReadHeaderNumber(std::istream& in, const char* field) {
  SkipSpaceAndComments(in);
  std::string digits;
  while (std::isdigit(in.peek())) digits.push_back(static_cast<char>(in.get()));
  if (digits.empty() || digits.size() > 9) {
    throw PgmError(std::string("PGM: malformed ") + field + " in header");
  }
  return static_cast<std::size_t>(std::stoul(digits));
}
}  // namespace detail

inline GrayImage ReadPgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw PgmError("PGM: expected binary 'P5' magic number");
  }
  GrayImage img;
  img.width = detail::ReadHeaderNumber(in, "width");
  img.height = detail::ReadHeaderNumber(in, "height");
  const std::size_t maxval = detail::ReadHeaderNumber(in, "maxval");
  if (img.width == 0 || img.height == 0) throw PgmError("PGM: zero image dimension");
  if (maxval == 0 || maxval > 255) throw PgmError("PGM: only 8-bit images (maxval <= 255) are supported");
  if (!std::isspace(in.get())) throw PgmError("PGM: missing whitespace after maxval");
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw PgmError("PGM: truncated pixel data (expected " + std::to_string(img.pixels.size()) +
                   " bytes, got " + std::to_string(in.gcount()) + ")");
  }
  return img;
}

inline GrayImage ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("PGM: cannot open '" + path + "'");
  return ReadPgm(in);
}

inline void WritePgm(std::ostream& out, const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height) throw PgmError("PGM: pixel buffer size mismatch");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void WritePgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError("PGM: cannot write '" + path + "'");
  WritePgm(out, img);
}

}  // namespace sslab
