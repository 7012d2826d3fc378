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

// Analytic FLOP counts for the defense pipeline. All counts are exact
// integer functions of layer shapes.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selfcheck/model.h"

namespace selfcheck {

// Shape-only view of a network. Weights may be empty, so tables for large
// reference architectures cost nothing to build.
struct LayerTable {
  Shape input_shape;
  std::vector<LayerSpec> layers;
  std::size_t last_conv = 0;
};

LayerTable TableOf(const Model& model);

// 13 conv (3x3, pad 1) + 5 max-pool + 3 dense, at image x image.
LayerTable Vgg16Table(std::size_t image = 224, std::size_t classes = 1000);

struct CostModel {
  std::uint64_t flops_per_mac = 1;
  std::uint64_t fft_butterfly = 5;
};

// Per-layer r^2 * n_in * h * w (conv) or n_in * n_out (dense), times
// flops_per_mac; zero for other kinds.
std::vector<std::uint64_t> LayerFlops(const LayerTable& table, const CostModel& cost = {});
std::uint64_t FlopsInference(const LayerTable& table, const CostModel& cost = {});
// Layers strictly after last_conv.
std::uint64_t FlopsHead(const LayerTable& table, const CostModel& cost = {});

std::uint64_t FlopsCam(std::size_t channels, std::size_t h, std::size_t w);
std::uint64_t FlopsCam(const LayerTable& table);

// butterfly * n * log2 n over the power-of-two padded extent.
std::uint64_t FlopsFft(std::size_t rows, std::size_t cols, const CostModel& cost = {});
// n_a * log2 n_a over the padded pattern size.
std::uint64_t FlopsJaccard(std::size_t pattern_pixels);
std::uint64_t FlopsInterpolation(std::size_t patch_pixels);
std::uint64_t FlopsPcc(std::size_t vector_len);

enum class Scenario { kImage, kAudio };
Scenario ParseScenario(const std::string& s);

struct PipelineOptions {
  std::size_t crop_size = 32;     // FFT/Jaccard run on crop_size^2 masks
  std::size_t region_pixels = 0;  // inpainted pixels; 0 means crop_size^2
  bool include_recovery = true;
  CostModel cost;
};

struct CostBreakdown {
  std::uint64_t inference = 0;    // C_C
  std::uint64_t cam = 0;          // C_M
  std::uint64_t fft = 0;          // C_F
  std::uint64_t jaccard = 0;      // C_J
  std::uint64_t interpolation = 0;  // C_L
  std::uint64_t pcc = 0;          // C_P
  std::uint64_t reinference = 0;  // image: second full pass; audio: head only
  std::uint64_t total = 0;

  std::uint64_t Sum() const {
    return inference + cam + fft + jaccard + interpolation + pcc + reinference;
  }
  // Share of the total spent inside the CNN (both passes).
  double InferenceShare() const {
    return total ? static_cast<double>(inference + reinference) / total : 0.0;
  }
};

CostBreakdown PipelineCost(const LayerTable& table, Scenario scenario,
                           const PipelineOptions& opt = {});

std::string FormatBreakdown(const CostBreakdown& b, Scenario scenario);

}  // namespace selfcheck
