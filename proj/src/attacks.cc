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

#include "selfcheck/attacks.h"

#include <algorithm>
#include <cmath>

#include "selfcheck/engine.h"
#include "selfcheck/error.h"
#include "selfcheck/evidence.h"
#include "selfcheck/train.h"

namespace selfcheck {

namespace {

using Location = std::pair<std::size_t, std::size_t>;

float Sign(float v) { return v > 0 ? 1.0f : (v < 0 ? -1.0f : 0.0f); }

// Gradient of the loss the attacker ascends, with respect to the waveform.
Tensor WaveGradient(const Model& model, const Tensor& wave, std::size_t cls, bool targeted,
                    const MfccConfig& mfcc) {
  Tensor feats = AudioFeatures(model, wave, mfcc);
  Tensor g = CrossEntropyInputGradient(model, feats, cls);
  if (targeted)
    for (float& v : g.values()) v = -v;
  const std::size_t frames = NumFrames(wave.size(), mfcc);
  return MfccBackward(wave, mfcc, g.Reshaped({frames, mfcc.coefficients}));
}

void CheckWave(const Tensor& w, double eps) {
  if (w.rank() != 1) throw ShapeError("waveform must be 1-D, got " + ShapeString(w.shape()));
  if (!(eps >= 0) || !std::isfinite(eps)) throw InvalidArgument("epsilon must be >= 0");
  for (float v : w.values())
    if (!(v >= -1.0f && v <= 1.0f)) throw InvalidArgument("waveform samples must lie in [-1,1]");
}

}  // namespace

PatchContent ParsePatchContent(const std::string& s) {
  if (s == "optimized") return PatchContent::kOptimized;
  if (s == "noise") return PatchContent::kNoise;
  if (s == "file") return PatchContent::kFile;
  throw InvalidArgument("unknown patch content '" + s + "' (optimized, noise, file)");
}

const char* PatchContentName(PatchContent c) {
  switch (c) {
    case PatchContent::kOptimized: return "optimized";
    case PatchContent::kNoise: return "noise";
    case PatchContent::kFile: return "file";
  }
  return "?";
}

Tensor ApplyPatch(const Tensor& image, const Tensor& patch, std::size_t top, std::size_t left) {
  if (image.rank() != 3) throw ShapeError("apply_patch expects a [C,H,W] image");
  if (patch.size() == 0) return image;
  if (patch.rank() != 3)
    throw ShapeError("apply_patch expects [C,H,W] image and patch");
  if (patch.dim(0) != image.dim(0)) throw ShapeError("patch channel count differs from image");
  if (top + patch.dim(1) > image.dim(1) || left + patch.dim(2) > image.dim(2))
    throw InvalidArgument("patch " + ShapeString(patch.shape()) + " at (" + std::to_string(top) +
                          "," + std::to_string(left) + ") does not fit image " +
                          ShapeString(image.shape()));
  Tensor out = image;
  for (std::size_t c = 0; c < patch.dim(0); ++c)
    for (std::size_t y = 0; y < patch.dim(1); ++y)
      for (std::size_t x = 0; x < patch.dim(2); ++x)
        out.at(c, top + y, left + x) = patch.at(c, y, x);
  return out;
}

std::pair<std::size_t, std::size_t> RandomLocation(const Shape& shape, std::size_t size,
                                                   std::mt19937_64& rng) {
  if (shape.size() != 3 || size > shape[1] || size > shape[2])
    throw InvalidArgument("patch of size " + std::to_string(size) + " does not fit " +
                          ShapeString(shape));
  std::uniform_int_distribution<std::size_t> ry(0, shape[1] - size), rx(0, shape[2] - size);
  const std::size_t top = ry(rng);
  return {top, rx(rng)};
}

Tensor NoisePatch(std::size_t channels, std::size_t size, std::mt19937_64& rng) {
  if (size == 0) return Tensor();
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor p({channels, size, size});
  for (float& v : p.values()) v = u(rng);
  return p;
}

double FoolingRate(const Model& model, const Tensor& patch, std::size_t target,
                   const LabeledSet& pool, const std::vector<Location>& locations) {
  if (pool.empty()) throw InvalidArgument("fooling rate of an empty pool");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Tensor x = ApplyPatch(pool.inputs[i], patch, locations[i].first, locations[i].second);
    if (Forward(model, x).predicted == target) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(pool.size());
}

PatchOptimization OptimizePatch(const Model& model, std::size_t target, const PatchSpec& spec,
                                std::size_t steps, double eta, const LabeledSet& pool,
                                std::uint64_t seed) {
  if (target >= model.num_classes()) throw InvalidArgument("target class out of range");
  if (pool.empty()) throw InvalidArgument("patch optimization needs a non-empty pool");
  const Shape& in = model.input_shape();
  std::mt19937_64 rng(seed);
  auto locate = [&]() -> Location {
    if (spec.random_location) return RandomLocation(in, spec.size, rng);
    return {spec.top, spec.left};
  };
  Tensor patch = NoisePatch(in[0], spec.size, rng);
  std::vector<Location> score_at;
  for (std::size_t i = 0; i < pool.size(); ++i) score_at.push_back(locate());
  const Objective logit = Objective::ClassLogit(model, target);

  auto mean_logit = [&](const Tensor& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Tensor x = ApplyPatch(pool.inputs[i], p, score_at[i].first, score_at[i].second);
      s += RunLayers(model, x, 0, model.logits_layer() + 1)[target];
    }
    return s / static_cast<double>(pool.size());
  };

  PatchOptimization best;
  best.patch = patch;
  best.fooling_rate = FoolingRate(model, patch, target, pool, score_at);
  double best_obj = mean_logit(patch);
  double peak_obj = best_obj;
  best.objective.push_back(peak_obj);
  for (std::size_t step = 0; step < steps; ++step) {
    Tensor grad(patch.shape());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto [top, left] = locate();
      Tensor g = InputGradient(model, ApplyPatch(pool.inputs[i], patch, top, left), logit);
      for (std::size_t c = 0; c < patch.dim(0); ++c)
        for (std::size_t y = 0; y < spec.size; ++y)
          for (std::size_t x = 0; x < spec.size; ++x)
            grad.at(c, y, x) += g.at(c, top + y, left + x);
    }
    for (std::size_t j = 0; j < patch.size(); ++j) {
      patch[j] = std::clamp(patch[j] + static_cast<float>(eta) * Sign(grad[j]), 0.0f, 1.0f);
    }
    const double obj = mean_logit(patch);
    if (!std::isfinite(obj)) throw NonFinite("patch objective is not finite", static_cast<int>(step));
    const double rate = FoolingRate(model, patch, target, pool, score_at);
    if (rate > best.fooling_rate || (rate == best.fooling_rate && obj > best_obj)) {
      best.patch = patch;
      best.fooling_rate = rate;
      best_obj = obj;
    }
    peak_obj = std::max(peak_obj, obj);
    best.objective.push_back(peak_obj);
  }
  return best;
}

Tensor FgsmAudio(const Model& model, const Tensor& waveform, double epsilon,
                 std::optional<std::size_t> target, std::optional<std::size_t> label,
                 const MfccConfig& mfcc) {
  return BimAudio(model, waveform, epsilon, epsilon, 1, target, label, mfcc);
}

Tensor BimAudio(const Model& model, const Tensor& waveform, double epsilon, double alpha,
                std::size_t iterations, std::optional<std::size_t> target,
                std::optional<std::size_t> label, const MfccConfig& mfcc) {
  CheckWave(waveform, epsilon);
  if (!(alpha >= 0)) throw InvalidArgument("step size must be >= 0");
  if (epsilon == 0.0 || iterations == 0) return waveform;
  const bool targeted = target.has_value();
  std::size_t cls;
  if (targeted) {
    cls = *target;
  } else if (label) {
    cls = *label;
  } else {
    cls = Forward(model, AudioFeatures(model, waveform, mfcc)).predicted;
  }
  if (cls >= model.num_classes()) throw InvalidArgument("class out of range");
  Tensor x = waveform;
  for (std::size_t it = 0; it < iterations; ++it) {
    Tensor g = WaveGradient(model, x, cls, targeted, mfcc);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo = std::max(-1.0, static_cast<double>(waveform[i]) - epsilon);
      const double hi = std::min(1.0, static_cast<double>(waveform[i]) + epsilon);
      const double v = x[i] + alpha * Sign(g[i]);
      x[i] = static_cast<float>(std::clamp(v, lo, hi));
    }
  }
  return x;
}

}  // namespace selfcheck
