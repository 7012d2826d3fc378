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

#include "selfcheck/tensor.h"

#include <cmath>
#include <sstream>

#include "selfcheck/error.h"

namespace selfcheck {

std::size_t NumElements(const Shape& shape) {
  if (shape.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void CheckShape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have rank >= 1");
  for (std::size_t d : shape)
    if (d == 0) throw ShapeError("tensor dims must be positive, got " + ShapeString(shape));
}

}  // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)) {
  CheckShape(shape_);
  data_.assign(NumElements(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckShape(shape_);
  if (NumElements(shape_) != data_.size())
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeString(shape_));
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::Fill(float v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::AllFinite() const {
  for (float v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace selfcheck
