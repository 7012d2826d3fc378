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

// Procedural datasets and small reference architectures used by the
// evaluation harness and demos: ten grayscale shape classes on a 32x32
// canvas, and eight tonal "keyword" classes as one-second 16 kHz clips.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "selfcheck/dataset.h"
#include "selfcheck/model.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

inline constexpr std::size_t kShapeSize = 32;
inline constexpr std::size_t kClipSamples = 16000;

const std::vector<std::string>& ShapeLabels();
const std::vector<std::string>& KeywordLabels();

// [1, size, size] in [0,1].
Tensor RenderShape(std::size_t cls, std::mt19937_64& rng, std::size_t size = kShapeSize);

// [kClipSamples] in [-1,1].
Tensor SynthesizeKeyword(std::size_t cls, std::mt19937_64& rng);

// per_class samples of every class, interleaved by class, from one seed.
LabeledSet MakeShapeSet(std::size_t per_class, std::uint64_t seed);
LabeledSet MakeKeywordSet(std::size_t per_class, std::uint64_t seed);

// Untrained architectures with He-initialized weights.
//   image: [1,32,32] conv8-pool-conv16-conv32(last) -> gap -> dense10
//   audio: [1,98,13] conv8-pool-conv16-pool-conv24-pool4-conv16(last) -> dense8
Model ToyImageModel(std::uint64_t seed);
Model ToyAudioModel(std::uint64_t seed);

}  // namespace selfcheck
