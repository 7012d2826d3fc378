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

// Forward inference with activation taps, and reverse-mode gradients with
// respect to the input (and optionally the parameters).
//
// Storage is 32-bit; conv and dense reductions accumulate in 64-bit.

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "selfcheck/model.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

// Layer index -> that layer's output for one forward pass.
using ActivationTaps = std::map<std::size_t, Tensor>;

struct ForwardResult {
  Tensor probabilities;
  std::size_t predicted = 0;
  ActivationTaps taps;
};

// Counts inference passes. Callers own one per call they want to audit.
struct PassCounter {
  int full = 0;  // input -> softmax
  int head = 0;  // last conv output -> softmax
};

// Index of the largest element; ties go to the lowest index.
std::size_t Argmax(std::span<const float> v);

Tensor Conv2dForward(const Tensor& input, const LayerSpec& layer);
Tensor LayerForward(const LayerSpec& layer, const Tensor& input);

ForwardResult Forward(const Model& model, const Tensor& input,
                      const std::set<std::size_t>& tap_layers = {},
                      PassCounter* counter = nullptr);

// Runs layers [begin, end) on x, which must have the shape expected by
// layer `begin`.
Tensor RunLayers(const Model& model, Tensor x, std::size_t begin, std::size_t end);

// Runs every layer after the activation layer (see Model::activation_layer)
// on `activations`.
ForwardResult ForwardHead(const Model& model, const Tensor& activations,
                          PassCounter* counter = nullptr);

// Scalar objective for gradient computations.
struct Objective {
  std::size_t layer = 0;
  std::size_t index = 0;

  static Objective Neuron(std::size_t layer, std::size_t index) { return {layer, index}; }
  static Objective ClassLogit(const Model& model, std::size_t cls) {
    return {model.logits_layer(), cls};
  }
};

// d objective / d input, same shape as input. ReLU derivative at 0 is 0;
// max-pool routes to the first maximal element of each window.
Tensor InputGradient(const Model& model, const Tensor& input, const Objective& objective);

// Activations of a forward pass: trace[0] is the input, trace[i + 1] the
// output of layer i, for layers [0, through_layer].
std::vector<Tensor> ForwardTrace(const Model& model, const Tensor& input,
                                 std::size_t through_layer);

struct ParamGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  explicit ParamGrads(const Model& model);
  void Zero();
};

// Backpropagates `grad_top` (gradient w.r.t. the output of layer `top_layer`)
// to the input. Parameter gradients are accumulated into `grads` when given.
Tensor Backward(const Model& model, const std::vector<Tensor>& trace,
                std::size_t top_layer, Tensor grad_top, ParamGrads* grads = nullptr);

}  // namespace selfcheck
