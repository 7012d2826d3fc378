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

// Attack generators for exercising the detector: pixel-replacement patches
// (optimized toward a target class or uniform noise) and waveform-level
// FGSM / BIM through the differentiable MFCC front end.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "selfcheck/dataset.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/model.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

enum class PatchContent { kOptimized, kNoise, kFile };

PatchContent ParsePatchContent(const std::string& s);
const char* PatchContentName(PatchContent c);

struct PatchSpec {
  std::size_t size = 12;  // square side in pixels
  bool random_location = true;
  std::size_t top = 0;    // used when random_location is false
  std::size_t left = 0;
  PatchContent content = PatchContent::kOptimized;
  std::string path;       // kFile: LNCT tensor [C,size,size]
};

// Pixel replacement of `patch` ([C,h,w]) at (top, left). Throws
// InvalidArgument when the patch does not fit. An empty tensor is the
// zero-size patch and leaves the image unchanged.
Tensor ApplyPatch(const Tensor& image, const Tensor& patch, std::size_t top, std::size_t left);

// Uniformly random top-left corner for a size x size patch.
std::pair<std::size_t, std::size_t> RandomLocation(const Shape& image_shape, std::size_t size,
                                                   std::mt19937_64& rng);

// Independent uniform [0,1] value per pixel and channel; size 0 gives the
// empty patch.
Tensor NoisePatch(std::size_t channels, std::size_t size, std::mt19937_64& rng);

struct PatchOptimization {
  Tensor patch;
  double fooling_rate = 0.0;          // of the returned patch on the pool
  std::vector<double> objective;      // best mean target logit so far, per step (steps + 1)
};

// Signed-gradient ascent of the mean target-class logit over `pool` with
// respect to the patch pixels, starting from uniform noise. Patch locations
// are redrawn per image and step when spec.random_location is set;
// the fooling rate is scored at one fixed draw per image. Returns the iterate
// with the highest targeted fooling rate (ties: higher objective).
PatchOptimization OptimizePatch(const Model& model, std::size_t target, const PatchSpec& spec,
                                std::size_t steps, double eta, const LabeledSet& pool,
                                std::uint64_t seed);

// Targeted fooling rate of a patch pasted at the given per-image locations.
double FoolingRate(const Model& model, const Tensor& patch, std::size_t target,
                   const LabeledSet& pool,
                   const std::vector<std::pair<std::size_t, std::size_t>>& locations);

// x' = clamp(x + eps * sign(grad), -1, 1) where grad is the waveform gradient
// of the cross-entropy of `label` (untargeted, ascent) or of `target`
// (targeted, descent). `label` defaults to the clean prediction.
Tensor FgsmAudio(const Model& model, const Tensor& waveform, double epsilon,
                 std::optional<std::size_t> target = std::nullopt,
                 std::optional<std::size_t> label = std::nullopt, const MfccConfig& mfcc = {});

// Iterated FGSM with step `alpha`, projected into the eps ball around the
// clean waveform and [-1,1] after every step.
Tensor BimAudio(const Model& model, const Tensor& waveform, double epsilon, double alpha,
                std::size_t iterations, std::optional<std::size_t> target = std::nullopt,
                std::optional<std::size_t> label = std::nullopt, const MfccConfig& mfcc = {});

}  // namespace selfcheck
