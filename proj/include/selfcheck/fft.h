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

#pragma once

// Radix-2 complex FFT and the 2-D row-column transform built on it.

#include <complex>
#include <cstddef>
#include <vector>

#include "selfcheck/tensor.h"

namespace selfcheck {

using Complex = std::complex<double>;

bool IsPowerOfTwo(std::size_t n);
std::size_t NextPowerOfTwo(std::size_t n);

// In-place unnormalized transform; size must be a power of two. The inverse
// applies the 1/N factor.
void Fft(std::vector<Complex>& data, bool inverse = false);

// Row-major complex grid.
struct Spectrum2d {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> bins;

  Complex& at(std::size_t u, std::size_t v) { return bins[u * cols + v]; }
  const Complex& at(std::size_t u, std::size_t v) const { return bins[u * cols + v]; }
};

// Unnormalized forward DFT of a real H x W image, zero-padded to the next
// powers of two. Throws InvalidArgument on empty or non-2-D input.
Spectrum2d Fft2d(const Tensor& image);

// Inverse of Fft2d on the padded grid; returns the real part.
Tensor InverseFft2d(const Spectrum2d& spectrum);

}  // namespace selfcheck
