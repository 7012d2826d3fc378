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

#include <cstddef>
#include <string>

#include "selfcheck/tensor.h"

namespace selfcheck {

// Axis-aligned pixel box; rows [top, top + height), cols [left, left + width).
struct Region {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t area() const { return height * width; }
  bool Contains(std::size_t y, std::size_t x) const {
    return y >= top && y < top + height && x >= left && x < left + width;
  }
  friend bool operator==(const Region&, const Region&) = default;
};

// Channel mean of a [C,H,W] image (or a copy of a 2-D one), as [H,W].
Tensor ToGray(const Tensor& image);

// [C,H,W] sub-image. Region must lie inside the image.
Tensor Crop(const Tensor& image, const Region& region);

// Nearest-neighbor resize of a 2-D tensor.
Tensor ResizeNearest(const Tensor& plane, std::size_t rows, std::size_t cols);

// 8-bit binary PGM of a 2-D tensor, linearly scaled so the maximum maps to
// 255 (values below 0 clamp to 0).
void WritePgm(const std::string& path, const Tensor& plane);

}  // namespace selfcheck
