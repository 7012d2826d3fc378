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

#include "selfcheck/evidence.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selfcheck/error.h"
#include "selfcheck/interpret.h"

namespace selfcheck {

BinarySpectrum RegionSpectrum(const Tensor& image, const Region& region, std::size_t crop_size) {
  if (!IsPowerOfTwo(crop_size)) throw InvalidArgument("crop size must be a power of two");
  Tensor img = image.rank() == 2 ? image.Reshaped({1, image.dim(0), image.dim(1)}) : image;
  Tensor patch = ResizeNearest(ToGray(Crop(img, region)), crop_size, crop_size);
  return BinarizeSpectrum(Fft2d(patch));
}

ImageEvidence ExtractImageEvidence(const Model& model, const Tensor& image, double alpha,
                                   std::size_t crop_size, PassCounter* counter) {
  ImageEvidence ev;
  ev.forward = Forward(model, image, {model.activation_layer()}, counter);
  ev.heatmap = Cam(ev.forward.taps.at(model.activation_layer()));
  ev.region = LocalizePrimaryRegion(ev.heatmap, image.shape(), alpha);
  ev.pattern = RegionSpectrum(image, ev.region, crop_size);
  return ev;
}

std::vector<float> ActivationDistribution(const Tensor& tap) {
  std::vector<float> out(tap.size());
  for (std::size_t i = 0; i < tap.size(); ++i) out[i] = std::abs(tap[i]);
  return out;
}

Tensor AudioFeatures(const Model& model, const Tensor& waveform, const MfccConfig& cfg) {
  Tensor feats = Mfcc(waveform, cfg);
  if (feats.size() != NumElements(model.input_shape()))
    throw ShapeError("mfcc features " + ShapeString(feats.shape()) +
                     " do not fit model input " + ShapeString(model.input_shape()));
  return feats.Reshaped(model.input_shape());
}

std::vector<std::size_t> TopK(std::span<const float> values, std::size_t k) {
  if (k > values.size())
    throw InvalidArgument("top-k: k = " + std::to_string(k) + " exceeds length " +
                          std::to_string(values.size()));
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  idx.resize(k);
  return idx;
}

}  // namespace selfcheck
