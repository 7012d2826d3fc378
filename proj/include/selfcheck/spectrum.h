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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selfcheck/fft.h"

namespace selfcheck {

// 2-D bit grid over a DC-centered (fftshifted) spectrum. Dims are powers of two.
class BinarySpectrum {
 public:
  BinarySpectrum() = default;
  BinarySpectrum(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return bits_.size(); }
  bool get(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_[r * cols_ + c] = v ? 1 : 0; }
  bool bit(std::size_t i) const { return bits_[i] != 0; }
  void set_bit(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  std::size_t Count() const;

  friend bool operator==(const BinarySpectrum&, const BinarySpectrum&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// m = log(1 + |X|), shifted so DC sits at (rows/2, cols/2). A bin is set iff
// m exceeds the mean of m over all non-DC bins; the DC bin is always clear,
// so a constant brightness offset cannot change the mask.
BinarySpectrum BinarizeSpectrum(const Spectrum2d& spectrum);

// Majority vote per bit: set iff at least half the masks set it.
BinarySpectrum MajorityVote(const std::vector<BinarySpectrum>& masks);

}  // namespace selfcheck
