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

#include "selfcheck/metrics.h"

#include <algorithm>
#include <cmath>

#include "selfcheck/error.h"

namespace selfcheck {

double JaccardInconsistency(const BinarySpectrum& a, const BinarySpectrum& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("jaccard: mask dims differ");
  std::size_t uni = 0, inter = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a.bit(i), y = b.bit(i);
    uni += (x || y);
    inter += (x && y);
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(uni - inter) / static_cast<double>(uni);
}

double PearsonInconsistency(std::span<const float> f, std::span<const float> g) {
  if (f.size() != g.size()) throw InvalidArgument("pearson: length mismatch");
  if (f.size() < 2) throw InvalidArgument("pearson: needs at least two elements");
  const double n = static_cast<double>(f.size());
  double mf = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    mf += f[i];
    mg += g[i];
  }
  mf /= n;
  mg /= n;
  double cov = 0.0, vf = 0.0, vg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double df = f[i] - mf, dg = g[i] - mg;
    cov += df * dg;
    vf += df * df;
    vg += dg * dg;
  }
  cov /= n;
  vf /= n;
  vg /= n;
  if (vf <= 1e-12 || vg <= 1e-12)
    throw DegenerateInput("pearson: zero-variance activation vector");
  const double pcc = std::clamp(cov / (std::sqrt(vf) * std::sqrt(vg)), -1.0, 1.0);
  return 1.0 - pcc;
}

}  // namespace selfcheck
