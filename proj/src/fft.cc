// Copyright 2026 The selfcheck Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "selfcheck/fft.h"

#include <cmath>
#include <numbers>

#include "selfcheck/error.h"

namespace selfcheck {

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!IsPowerOfTwo(n)) throw InvalidArgument("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // exact twiddles, no recurrence drift
        const Complex w(std::cos(ang * static_cast<double>(k)),
                        std::sin(ang * static_cast<double>(k)));
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

namespace {

void Transform2d(Spectrum2d& s, bool inverse) {
  std::vector<Complex> line(s.cols);
  for (std::size_t u = 0; u < s.rows; ++u) {
    for (std::size_t v = 0; v < s.cols; ++v) line[v] = s.at(u, v);
    Fft(line, inverse);
    for (std::size_t v = 0; v < s.cols; ++v) s.at(u, v) = line[v];
  }
  line.resize(s.rows);
  for (std::size_t v = 0; v < s.cols; ++v) {
    for (std::size_t u = 0; u < s.rows; ++u) line[u] = s.at(u, v);
    Fft(line, inverse);
    for (std::size_t u = 0; u < s.rows; ++u) s.at(u, v) = line[u];
  }
}

}  // namespace

Spectrum2d Fft2d(const Tensor& image) {
  if (image.empty()) throw InvalidArgument("fft2d: empty input");
  if (image.rank() != 2) throw InvalidArgument("fft2d: expects a 2-D image");
  Spectrum2d s;
  s.rows = NextPowerOfTwo(image.dim(0));
  s.cols = NextPowerOfTwo(image.dim(1));
  s.bins.assign(s.rows * s.cols, Complex(0.0, 0.0));
  for (std::size_t y = 0; y < image.dim(0); ++y)
    for (std::size_t x = 0; x < image.dim(1); ++x) s.at(y, x) = image.at(y, x);
  Transform2d(s, false);
  return s;
}

Tensor InverseFft2d(const Spectrum2d& spectrum) {
  Spectrum2d s = spectrum;
  Transform2d(s, true);
  Tensor out({s.rows, s.cols});
  for (std::size_t i = 0; i < s.bins.size(); ++i) out[i] = static_cast<float>(s.bins[i].real());
  return out;
}

}  // namespace selfcheck
