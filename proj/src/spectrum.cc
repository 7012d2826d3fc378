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

#include "selfcheck/spectrum.h"

#include <cmath>

#include "selfcheck/error.h"

namespace selfcheck {

BinarySpectrum::BinarySpectrum(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_(rows * cols, 0) {
  if (!IsPowerOfTwo(rows) || !IsPowerOfTwo(cols))
    throw InvalidArgument("binary spectrum dims must be powers of two");
}

std::size_t BinarySpectrum::Count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

BinarySpectrum BinarizeSpectrum(const Spectrum2d& s) {
  const std::size_t R = s.rows, C = s.cols;
  BinarySpectrum out(R, C);
  std::vector<double> mag(R * C);
  double sum = 0.0;
  for (std::size_t u = 0; u < R; ++u)
    for (std::size_t v = 0; v < C; ++v) {
      // shifted position of bin (u, v)
      std::size_t r = (u + R / 2) % R, c = (v + C / 2) % C;
      double m = std::log1p(std::abs(s.at(u, v)));
      mag[r * C + c] = m;
      if (u || v) sum += m;
    }
  if (R * C == 1) return out;
  const double mean = sum / static_cast<double>(R * C - 1);
  const std::size_t dc = (R / 2) * C + C / 2;
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (i != dc && mag[i] > mean) out.set_bit(i, true);
  return out;
}

BinarySpectrum MajorityVote(const std::vector<BinarySpectrum>& masks) {
  if (masks.empty()) throw InvalidArgument("majority vote over zero masks");
  const std::size_t R = masks[0].rows(), C = masks[0].cols();
  std::vector<std::size_t> votes(R * C, 0);
  for (const auto& m : masks) {
    if (m.rows() != R || m.cols() != C)
      throw InvalidArgument("majority vote over masks of different dims");
    for (std::size_t i = 0; i < votes.size(); ++i) votes[i] += m.bit(i);
  }
  BinarySpectrum out(R, C);
  for (std::size_t i = 0; i < votes.size(); ++i) out.set_bit(i, 2 * votes[i] >= masks.size());
  return out;
}

}  // namespace selfcheck
