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
#include <cstdint>
#include <string>
#include <vector>

#include "selfcheck/tensor.h"

namespace selfcheck {

enum class LayerKind : std::uint8_t {
  kConv2d = 1,
  kRelu = 2,
  kMaxPool2d = 3,
  kGlobalAvgPool = 4,
  kDense = 5,
  kSoftmax = 6,
};

const char* LayerKindName(LayerKind kind);

// One layer of a sequential CNN. Only the fields relevant to `kind` are used.
//
//   conv2d:     weights [out_channels, in_channels, kernel, kernel], bias [out_channels]
//   maxpool2d:  kernel, stride
//   dense:      weights [out_features, in_features], bias [out_features]; the
//               input is flattened row-major
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  // Factories allocate zero weights of the right size.
  static LayerSpec Conv2d(std::size_t in_channels, std::size_t out_channels,
                          std::size_t kernel, std::size_t stride = 1,
                          std::size_t padding = 0);
  static LayerSpec Relu();
  static LayerSpec MaxPool2d(std::size_t kernel, std::size_t stride);
  static LayerSpec GlobalAvgPool();
  static LayerSpec Dense(std::size_t in_features, std::size_t out_features);
  static LayerSpec Softmax();

  std::size_t ExpectedWeightCount() const;
  std::size_t ExpectedBiasCount() const;
  bool HasParameters() const {
    return kind == LayerKind::kConv2d || kind == LayerKind::kDense;
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Output spatial extent of a window op. Windows start inside the padded
// input; a trailing incomplete window counts (max pooling takes the max of
// what is available).
std::size_t PooledExtent(std::size_t in, std::size_t kernel, std::size_t stride);
std::size_t ConvExtent(std::size_t in, std::size_t kernel, std::size_t stride,
                       std::size_t padding);

// Output shape of `layer` applied to `in`. Throws ShapeError on mismatch.
Shape LayerOutputShape(const LayerSpec& layer, const Shape& in);

// Shapes after every layer; result[i] is the output of layer i. Throws
// ShapeError naming the offending layer pair. Weights are not inspected.
std::vector<Shape> InferShapes(const Shape& input_shape,
                               const std::vector<LayerSpec>& layers);

// Immutable, validated sequential classifier.
class Model {
 public:
  Model(Shape input_shape, std::vector<std::string> labels,
        std::vector<LayerSpec> layers, std::size_t last_conv);

  const Shape& input_shape() const { return input_shape_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t num_classes() const { return labels_.size(); }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  const LayerSpec& layer(std::size_t i) const { return layers_.at(i); }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t last_conv() const { return last_conv_; }
  const Shape& output_shape(std::size_t layer) const { return shapes_.at(layer); }
  const Shape& last_conv_shape() const { return shapes_[last_conv_]; }
  // Layer whose output is read as the last-conv activations: the ReLU right
  // after the last conv when present, else the conv itself.
  std::size_t activation_layer() const {
    return last_conv_ + 1 < layers_.size() && layers_[last_conv_ + 1].kind == LayerKind::kRelu
               ? last_conv_ + 1
               : last_conv_;
  }
  const Shape& activation_shape() const { return shapes_[activation_layer()]; }
  // Index of the layer producing class logits (the one before softmax).
  std::size_t logits_layer() const { return layers_.size() - 2; }

  // Copy with new parameters for one layer; sizes must match.
  Model WithParameters(std::size_t layer, std::vector<float> weights,
                       std::vector<float> bias) const;

  friend bool operator==(const Model& a, const Model& b) {
    return a.input_shape_ == b.input_shape_ && a.labels_ == b.labels_ &&
           a.layers_ == b.layers_ && a.last_conv_ == b.last_conv_;
  }

 private:
  Shape input_shape_;
  std::vector<std::string> labels_;
  std::vector<LayerSpec> layers_;
  std::size_t last_conv_;
  std::vector<Shape> shapes_;
};

}  // namespace selfcheck
