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

#include "selfcheck/image_ops.h"

#include <algorithm>
#include <fstream>

#include "selfcheck/error.h"

namespace selfcheck {

Tensor ToGray(const Tensor& image) {
  if (image.rank() == 2) return image;
  if (image.rank() != 3) throw ShapeError("expected a [C,H,W] or [H,W] image");
  const std::size_t C = image.dim(0), H = image.dim(1), W = image.dim(2);
  Tensor out({H, W});
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x) {
      double s = 0.0;
      for (std::size_t c = 0; c < C; ++c) s += image.at(c, y, x);
      out.at(y, x) = static_cast<float>(s / static_cast<double>(C));
    }
  return out;
}

Tensor Crop(const Tensor& image, const Region& r) {
  if (image.rank() != 3) throw ShapeError("crop expects a [C,H,W] image");
  if (r.height == 0 || r.width == 0 || r.top + r.height > image.dim(1) ||
      r.left + r.width > image.dim(2))
    throw InvalidArgument("crop region outside image bounds");
  const std::size_t C = image.dim(0);
  Tensor out({C, r.height, r.width});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < r.height; ++y)
      for (std::size_t x = 0; x < r.width; ++x)
        out.at(c, y, x) = image.at(c, r.top + y, r.left + x);
  return out;
}

Tensor ResizeNearest(const Tensor& plane, std::size_t rows, std::size_t cols) {
  if (plane.rank() != 2) throw ShapeError("resize expects a 2-D tensor");
  const std::size_t H = plane.dim(0), W = plane.dim(1);
  Tensor out({rows, cols});
  for (std::size_t y = 0; y < rows; ++y) {
    const std::size_t sy = y * H / rows;
    for (std::size_t x = 0; x < cols; ++x) out.at(y, x) = plane.at(sy, x * W / cols);
  }
  return out;
}

void WritePgm(const std::string& path, const Tensor& plane) {
  if (plane.rank() != 2) throw ShapeError("pgm export expects a 2-D tensor");
  float mx = 0.0f;
  for (float v : plane.values()) mx = std::max(mx, v);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "P5\n" << plane.dim(1) << ' ' << plane.dim(0) << "\n255\n";
  for (float v : plane.values()) {
    float s = mx > 0.0f ? std::clamp(v / mx, 0.0f, 1.0f) : 0.0f;
    out.put(static_cast<char>(static_cast<unsigned char>(s * 255.0f + 0.5f)));
  }
}

}  // namespace selfcheck
