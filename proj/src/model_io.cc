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

#include "selfcheck/model_io.h"

namespace selfcheck {
namespace {

// Bounds every declared extent so parameter counts cannot overflow.
std::uint32_t Extent(ByteReader& r, std::size_t layer) {
  std::uint32_t v = r.U32();
  if (v > (1u << 16))
    throw FormatError("model: layer " + std::to_string(layer) + " declares extent " +
                      std::to_string(v) + " (limit 65536)");
  return v;
}

}  // namespace

Bytes SaveModel(const Model& model) {
  ByteWriter w;
  w.Raw("LNCM", 4);
  w.U16(kModelFormatVersion);
  w.U8(static_cast<std::uint8_t>(model.input_shape().size()));
  for (std::size_t d : model.input_shape()) w.U32(static_cast<std::uint32_t>(d));
  w.U32(static_cast<std::uint32_t>(model.labels().size()));
  for (const auto& label : model.labels()) w.Str(label);
  w.U32(static_cast<std::uint32_t>(model.last_conv()));
  w.U32(static_cast<std::uint32_t>(model.num_layers()));
  for (const LayerSpec& l : model.layers()) {
    w.U8(static_cast<std::uint8_t>(l.kind));
    switch (l.kind) {
      case LayerKind::kConv2d:
        w.U32(static_cast<std::uint32_t>(l.in_channels));
        w.U32(static_cast<std::uint32_t>(l.out_channels));
        w.U32(static_cast<std::uint32_t>(l.kernel));
        w.U32(static_cast<std::uint32_t>(l.stride));
        w.U32(static_cast<std::uint32_t>(l.padding));
        w.F32s(l.weights);
        w.F32s(l.bias);
        break;
      case LayerKind::kMaxPool2d:
        w.U32(static_cast<std::uint32_t>(l.kernel));
        w.U32(static_cast<std::uint32_t>(l.stride));
        break;
      case LayerKind::kDense:
        w.U32(static_cast<std::uint32_t>(l.in_features));
        w.U32(static_cast<std::uint32_t>(l.out_features));
        w.F32s(l.weights);
        w.F32s(l.bias);
        break;
      default:
        break;
    }
  }
  return w.Take();
}

Model LoadModel(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "model");
  r.Magic("LNCM");
  std::uint16_t version = r.U16();
  if (version != kModelFormatVersion)
    throw FormatError("model: unsupported version " + std::to_string(version));
  Shape input(r.U8());
  if (input.empty()) throw FormatError("model: input rank must be >= 1");
  for (auto& d : input) d = r.U32();
  std::uint32_t n_labels = r.U32();
  r.Need(std::size_t{n_labels} * 4);
  std::vector<std::string> labels(n_labels);
  for (auto& label : labels) label = r.Str();
  std::size_t last_conv = r.U32();
  std::uint32_t n_layers = r.U32();
  // Each record is at least one byte; reject absurd counts before allocating.
  r.Need(n_layers);
  std::vector<LayerSpec> layers;
  layers.reserve(n_layers);
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    std::uint8_t kind = r.U8();
    LayerSpec l;
    switch (static_cast<LayerKind>(kind)) {
      case LayerKind::kConv2d: {
        l.kind = LayerKind::kConv2d;
        l.in_channels = Extent(r, i);
        l.out_channels = Extent(r, i);
        l.kernel = Extent(r, i);
        l.stride = Extent(r, i);
        l.padding = Extent(r, i);
        l.weights = r.F32s(l.ExpectedWeightCount());
        l.bias = r.F32s(l.ExpectedBiasCount());
        break;
      }
      case LayerKind::kRelu:
        l = LayerSpec::Relu();
        break;
      case LayerKind::kMaxPool2d:
        l.kind = LayerKind::kMaxPool2d;
        l.kernel = Extent(r, i);
        l.stride = Extent(r, i);
        break;
      case LayerKind::kGlobalAvgPool:
        l = LayerSpec::GlobalAvgPool();
        break;
      case LayerKind::kDense:
        l.kind = LayerKind::kDense;
        l.in_features = r.U32();
        l.out_features = Extent(r, i);
        l.weights = r.F32s(l.ExpectedWeightCount());
        l.bias = r.F32s(l.ExpectedBiasCount());
        break;
      case LayerKind::kSoftmax:
        l = LayerSpec::Softmax();
        break;
      default:
        throw FormatError("model: unknown layer kind " + std::to_string(kind) +
                          " at layer " + std::to_string(i));
    }
    layers.push_back(std::move(l));
  }
  r.ExpectEnd();
  return Model(std::move(input), std::move(labels), std::move(layers), last_conv);
}

Model LoadModelFile(const std::string& path) { return LoadModel(ReadFileBytes(path)); }

void SaveModelFile(const Model& model, const std::string& path) {
  WriteFileBytes(path, SaveModel(model));
}

std::uint64_t ModelFingerprint(const Model& model) { return Fnv1a64(SaveModel(model)); }

}  // namespace selfcheck
