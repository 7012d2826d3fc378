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

#include <span>

#include "selfcheck/spectrum.h"

namespace selfcheck {

// (|a ∪ b| - |a ∩ b|) / |a ∪ b|, in [0, 1]. Two empty masks are consistent: 0.
double JaccardInconsistency(const BinarySpectrum& a, const BinarySpectrum& b);

// 1 - Pearson correlation with population moments, in [0, 2]. Throws
// DegenerateInput when either vector has variance <= 1e-12, InvalidArgument
// on length mismatch or length < 2.
double PearsonInconsistency(std::span<const float> practical, std::span<const float> expected);

}  // namespace selfcheck
