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

// Minimal supervised training for the small demonstration networks:
// softmax cross-entropy, Adam, mini-batches in a seeded shuffled order.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "selfcheck/dataset.h"
#include "selfcheck/model.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

struct TrainConfig {
  std::size_t epochs = 8;
  std::size_t batch = 32;
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// He-uniform weights, zero biases.
void InitializeParameters(std::vector<LayerSpec>& layers, const Shape& input_shape,
                          std::uint64_t seed);

// Gradient of -log p[label] with respect to the input. The model must end in
// softmax.
Tensor CrossEntropyInputGradient(const Model& model, const Tensor& input, std::size_t label,
                                 double* loss = nullptr);

Model Train(const Model& init, const LabeledSet& data, const TrainConfig& cfg,
            TrainStats* stats = nullptr);

double Accuracy(const Model& model, const LabeledSet& data);

}  // namespace selfcheck
