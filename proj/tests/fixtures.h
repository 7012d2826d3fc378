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

#include <random>

#include "oracles.h"
#include "selfcheck/model.h"

namespace selfcheck::testing {

// [2,6,6] -> conv(2->3,3x3,p1) -> relu -> maxpool(2) -> conv(3->4,3x3,p1)
//         -> relu -> gap -> dense(4->3) -> softmax. Last conv is layer 3.
inline Model SmallConvNet(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LayerSpec> layers;
  layers.push_back(LayerSpec::Conv2d(2, 3, 3, 1, 1));
  layers.push_back(LayerSpec::Relu());
  layers.push_back(LayerSpec::MaxPool2d(2, 2));
  layers.push_back(LayerSpec::Conv2d(3, 4, 3, 1, 1));
  layers.push_back(LayerSpec::Relu());
  layers.push_back(LayerSpec::GlobalAvgPool());
  layers.push_back(LayerSpec::Dense(4, 3));
  layers.push_back(LayerSpec::Softmax());
  for (auto& l : layers) RandomizeParameters(l, rng);
  return Model({2, 6, 6}, {"a", "b", "c"}, std::move(layers), 3);
}

// Single dense layer + softmax on a vector input; no conv, so it is wrapped
// with a 1x1 identity conv to satisfy the last-conv designation.
inline Model LinearNet(std::vector<float> weights, std::size_t in, std::size_t out) {
  std::vector<LayerSpec> layers;
  LayerSpec id = LayerSpec::Conv2d(1, 1, 1);
  id.weights = {1.0f};
  layers.push_back(id);
  LayerSpec d = LayerSpec::Dense(in, out);
  d.weights = std::move(weights);
  layers.push_back(d);
  layers.push_back(LayerSpec::Softmax());
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < out; ++i) labels.push_back("c" + std::to_string(i));
  return Model({1, 1, in}, labels, std::move(layers), 0);
}

}  // namespace selfcheck::testing
