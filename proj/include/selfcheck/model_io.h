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

// LNCM model container, version 1. All integers little-endian.
//
//   "LNCM"            4 bytes magic
//   version           u16 (= 1)
//   input rank        u8, then rank x u32 dims
//   class count       u32, then per class: u32 byte length + UTF-8 bytes
//   last-conv index   u32
//   layer count       u32, then per layer:
//     kind            u8 (1 conv2d, 2 relu, 3 maxpool2d, 4 global-avg-pool,
//                         5 dense, 6 softmax)
//     conv2d          u32 in_channels, out_channels, kernel, stride, padding,
//                     f32 weights[out*in*k*k], f32 bias[out]
//     maxpool2d       u32 kernel, stride
//     dense           u32 in_features, out_features,
//                     f32 weights[out*in], f32 bias[out]
//     others          no payload
//
// The writer emits exactly this layout, so save(load(b)) == b for any file
// the loader accepts.

#include <cstdint>
#include <span>
#include <string>

#include "selfcheck/binary_io.h"
#include "selfcheck/model.h"

namespace selfcheck {

inline constexpr std::uint16_t kModelFormatVersion = 1;

Bytes SaveModel(const Model& model);
Model LoadModel(std::span<const std::uint8_t> bytes);

Model LoadModelFile(const std::string& path);
void SaveModelFile(const Model& model, const std::string& path);

// Hash of the canonical serialization; identifies the model a profile store
// was built against.
std::uint64_t ModelFingerprint(const Model& model);

}  // namespace selfcheck
