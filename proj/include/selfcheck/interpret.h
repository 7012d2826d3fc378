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

// Activation maximization and class activation mapping.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "selfcheck/engine.h"
#include "selfcheck/image_ops.h"
#include "selfcheck/model.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

struct AmConfig {
  int steps = 50;
  double eta = 0.1;
  bool regularized = false;
  // Weight of the L2 + total-variation penalty when regularized.
  double lambda = 0.05;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct AmResult {
  Tensor pattern;
  double final_activation = 0.0;
  // Activation of the target neuron before step 1 and after every step.
  std::vector<double> trace;
};

// Gradient ascent on the input, X <- clamp01(X + eta * grad), starting from
// mid-gray plus uniform noise in [-0.01, 0.01]. When regularized the ascended
// objective is A(X) - lambda * (||X||^2 + TV(X)) with
// TV(X) = sum of squared horizontal and vertical neighbor differences; the
// penalty part of each step is taken implicitly (proximal step) so large
// lambda shrinks the pattern instead of oscillating.
// Throws NonFinite (with the step index) if the activation stops being finite.
AmResult ActivationMaximization(const Model& model, const Objective& neuron, const AmConfig& cfg);

// A_T(y, x) = sum_k A_k(y, x) over all channels of a [K,H,W] tap.
Tensor Cam(const Tensor& last_conv_taps);

inline constexpr double kDefaultAlpha = 0.7;

// Thresholds the heatmap at alpha * max, takes the 8-connected component of
// cells at or above threshold that contains the argmax (ties: lowest row,
// then column), and maps its bounding box to input pixels by the integer
// stride input_dim / heatmap_dim, clipped to the image. `input_shape` is
// [C,H,W] or [H,W]. Throws NoPrimarySource when the heatmap maximum is not
// positive.
Region LocalizePrimaryRegion(const Tensor& heatmap, const Shape& input_shape,
                             double alpha = kDefaultAlpha);

}  // namespace selfcheck
