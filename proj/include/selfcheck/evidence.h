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

// Per-input evidence shared by profile building and detection: the
// semantic pattern of the primary activation source (image) and the
// last-conv activation magnitude distribution (audio).

#include <cstddef>
#include <vector>

#include "selfcheck/engine.h"
#include "selfcheck/image_ops.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/model.h"
#include "selfcheck/spectrum.h"

namespace selfcheck {

inline constexpr std::size_t kDefaultCropSize = 32;

// Crop -> channel mean -> nearest resize to crop_size^2 -> fft2d -> binarize.
BinarySpectrum RegionSpectrum(const Tensor& image, const Region& region, std::size_t crop_size);

struct ImageEvidence {
  ForwardResult forward;  // carries the last-conv tap
  Tensor heatmap;
  Region region;
  BinarySpectrum pattern;
};

// One forward pass tapping the last conv, then cam -> localize -> spectrum.
// Throws NoPrimarySource when localization finds nothing.
ImageEvidence ExtractImageEvidence(const Model& model, const Tensor& image, double alpha,
                                   std::size_t crop_size, PassCounter* counter = nullptr);

// |activations| of a last-conv tap in channel-major, row, column order.
std::vector<float> ActivationDistribution(const Tensor& last_conv_tap);

// MFCC features reshaped to the model's input shape.
Tensor AudioFeatures(const Model& model, const Tensor& waveform, const MfccConfig& cfg);

// Indices of the k largest entries, largest first; ties go to the lower index.
std::vector<std::size_t> TopK(std::span<const float> values, std::size_t k);

}  // namespace selfcheck
