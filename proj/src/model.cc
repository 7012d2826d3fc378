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

#include "selfcheck/model.h"

#include <cmath>

#include "selfcheck/error.h"

namespace selfcheck {

const char* LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool2d: return "maxpool2d";
    case LayerKind::kGlobalAvgPool: return "global-avg-pool";
    case LayerKind::kDense: return "dense";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "unknown";
}

LayerSpec LayerSpec::Conv2d(std::size_t in_channels, std::size_t out_channels,
                            std::size_t kernel, std::size_t stride,
                            std::size_t padding) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.kernel = kernel;
  l.stride = stride;
  l.padding = padding;
  l.weights.assign(l.ExpectedWeightCount(), 0.0f);
  l.bias.assign(out_channels, 0.0f);
  return l;
}

LayerSpec LayerSpec::Relu() { return LayerSpec{}; }

LayerSpec LayerSpec::MaxPool2d(std::size_t kernel, std::size_t stride) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool2d;
  l.kernel = kernel;
  l.stride = stride;
  return l;
}

LayerSpec LayerSpec::GlobalAvgPool() {
  LayerSpec l;
  l.kind = LayerKind::kGlobalAvgPool;
  return l;
}

LayerSpec LayerSpec::Dense(std::size_t in_features, std::size_t out_features) {
  LayerSpec l;
  l.kind = LayerKind::kDense;
  l.in_features = in_features;
  l.out_features = out_features;
  l.weights.assign(l.ExpectedWeightCount(), 0.0f);
  l.bias.assign(out_features, 0.0f);
  return l;
}

LayerSpec LayerSpec::Softmax() {
  LayerSpec l;
  l.kind = LayerKind::kSoftmax;
  return l;
}

std::size_t LayerSpec::ExpectedWeightCount() const {
  switch (kind) {
    case LayerKind::kConv2d: return out_channels * in_channels * kernel * kernel;
    case LayerKind::kDense: return out_features * in_features;
    default: return 0;
  }
}

std::size_t LayerSpec::ExpectedBiasCount() const {
  switch (kind) {
    case LayerKind::kConv2d: return out_channels;
    case LayerKind::kDense: return out_features;
    default: return 0;
  }
}

std::size_t PooledExtent(std::size_t in, std::size_t kernel, std::size_t stride) {
  if (in <= kernel) return 1;
  return (in - kernel + stride - 1) / stride + 1;
}

std::size_t ConvExtent(std::size_t in, std::size_t kernel, std::size_t stride,
                       std::size_t padding) {
  std::size_t padded = in + 2 * padding;
  if (padded < kernel) return 0;
  return (padded - kernel) / stride + 1;
}

Shape LayerOutputShape(const LayerSpec& layer, const Shape& in) {
  auto fail = [&](const std::string& why) {
    throw ShapeError(std::string(LayerKindName(layer.kind)) + ": " + why +
                     " (input " + ShapeString(in) + ")");
  };
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (in.size() != 3) fail("expects [C,H,W] input");
      if (layer.kernel == 0) fail("kernel must be >= 1");
      if (layer.stride == 0) fail("stride must be >= 1");
      if (layer.out_channels == 0) fail("needs at least one filter");
      if (in[0] != layer.in_channels)
        fail("declares " + std::to_string(layer.in_channels) +
             " in-channels but receives " + std::to_string(in[0]));
      std::size_t h = ConvExtent(in[1], layer.kernel, layer.stride, layer.padding);
      std::size_t w = ConvExtent(in[2], layer.kernel, layer.stride, layer.padding);
      if (h == 0 || w == 0) fail("non-positive output spatial dims");
      return {layer.out_channels, h, w};
    }
    case LayerKind::kRelu:
      return in;
    case LayerKind::kMaxPool2d: {
      if (in.size() != 3) fail("expects [C,H,W] input");
      if (layer.kernel == 0 || layer.stride == 0) fail("kernel and stride must be >= 1");
      return {in[0], PooledExtent(in[1], layer.kernel, layer.stride),
              PooledExtent(in[2], layer.kernel, layer.stride)};
    }
    case LayerKind::kGlobalAvgPool:
      if (in.size() != 3) fail("expects [C,H,W] input");
      return {in[0]};
    case LayerKind::kDense:
      if (layer.out_features == 0) fail("needs at least one output");
      if (NumElements(in) != layer.in_features)
        fail("declares " + std::to_string(layer.in_features) +
             " in-features but receives " + std::to_string(NumElements(in)));
      return {layer.out_features};
    case LayerKind::kSoftmax:
      if (in.size() != 1) fail("expects a vector input");
      return in;
  }
  fail("unknown layer kind");
  return {};
}

std::vector<Shape> InferShapes(const Shape& input_shape,
                               const std::vector<LayerSpec>& layers) {
  std::vector<Shape> shapes;
  shapes.reserve(layers.size());
  Shape cur = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    try {
      cur = LayerOutputShape(layers[i], cur);
    } catch (const ShapeError& e) {
      std::string prev = i == 0 ? std::string("input")
                                : "layer " + std::to_string(i - 1) + " (" +
                                      LayerKindName(layers[i - 1].kind) + ")";
      throw ShapeError("shape composition failed between " + prev + " and layer " +
                       std::to_string(i) + ": " + e.what());
    }
    shapes.push_back(cur);
  }
  return shapes;
}

Model::Model(Shape input_shape, std::vector<std::string> labels,
             std::vector<LayerSpec> layers, std::size_t last_conv)
    : input_shape_(std::move(input_shape)),
      labels_(std::move(labels)),
      layers_(std::move(layers)),
      last_conv_(last_conv) {
  if (input_shape_.empty() || NumElements(input_shape_) == 0)
    throw ShapeError("model input shape must be non-empty with positive dims");
  if (layers_.empty() || layers_.back().kind != LayerKind::kSoftmax)
    throw FormatError("model must end with a softmax layer");
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i)
    if (layers_[i].kind == LayerKind::kSoftmax)
      throw FormatError("softmax may only appear as the last layer (found at " +
                        std::to_string(i) + ")");
  if (layers_.size() < 2) throw FormatError("model needs a layer before softmax");
  if (last_conv_ >= layers_.size() || layers_[last_conv_].kind != LayerKind::kConv2d)
    throw FormatError("last-conv index " + std::to_string(last_conv_) +
                      " does not name a conv2d layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    if (l.weights.size() != l.ExpectedWeightCount() || l.bias.size() != l.ExpectedBiasCount())
      throw FormatError("layer " + std::to_string(i) + " (" + LayerKindName(l.kind) +
                        ") has inconsistent parameter sizes");
  }
  shapes_ = InferShapes(input_shape_, layers_);
  if (shapes_.back().size() != 1 || shapes_.back()[0] != labels_.size())
    throw FormatError("model produces " + ShapeString(shapes_.back()) +
                      " outputs but has " + std::to_string(labels_.size()) + " labels");
}

Model Model::WithParameters(std::size_t layer, std::vector<float> weights,
                            std::vector<float> bias) const {
  Model copy = *this;
  LayerSpec& l = copy.layers_.at(layer);
  if (weights.size() != l.ExpectedWeightCount() || bias.size() != l.ExpectedBiasCount())
    throw InvalidArgument("parameter size mismatch for layer " + std::to_string(layer));
  l.weights = std::move(weights);
  l.bias = std::move(bias);
  return copy;
}

}  // namespace selfcheck
