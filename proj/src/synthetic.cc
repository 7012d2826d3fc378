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

#include "selfcheck/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfcheck/error.h"
#include "selfcheck/train.h"

namespace selfcheck {

namespace {

constexpr double kPi = std::numbers::pi;

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Signed inside test for shape `cls` in normalized coordinates (u, v) where
// the shape's nominal extent is the unit disk.
bool Inside(std::size_t cls, double u, double v) {
  const double au = std::abs(u), av = std::abs(v), r = std::hypot(u, v);
  switch (cls) {
    case 0: return r <= 1.0;                                    // disk
    case 1: return au <= 0.8 && av <= 0.8;                      // square
    case 2: return v <= 0.8 && v >= -0.9 && au <= (0.8 - v) * 0.55;  // triangle
    case 3: return r <= 1.0 && r >= 0.6;                        // ring
    case 4: return (au <= 0.25 && av <= 1.0) || (av <= 0.25 && au <= 1.0);  // plus
    case 5: return r <= 1.0 && (std::abs(u - v) <= 0.5 || std::abs(u + v) <= 0.5);  // x
    case 6: return au <= 0.9 && av <= 0.9 && std::fmod(v + 0.9, 0.6) < 0.3;  // h-bars
    case 7: return au <= 0.9 && av <= 0.9 && std::fmod(u + 0.9, 0.6) < 0.3;  // v-bars
    case 8: return au <= 0.85 && av <= 0.85 && (au >= 0.55 || av >= 0.55);  // frame
    case 9: return au + av <= 1.0;                              // diamond
  }
  return false;
}

struct Segment {
  double f0_start, f0_end;  // Hz
  double formant;           // Hz, centre of the emphasised harmonic band
};

// Two syllables per keyword.
const Segment kKeywords[8][2] = {
    {{220, 260, 700}, {260, 300, 1200}},   // up
    {{300, 200, 500}, {200, 180, 900}},    // down
    {{180, 180, 1800}, {240, 220, 600}},   // left
    {{250, 320, 2200}, {320, 320, 1000}},  // right
    {{200, 200, 800}, {200, 200, 2400}},   // on
    {{280, 240, 1500}, {240, 200, 400}},   // off
    {{160, 220, 1100}, {220, 280, 1600}},  // go
    {{320, 300, 2600}, {300, 260, 1300}},  // stop
};

}  // namespace

const std::vector<std::string>& ShapeLabels() {
  static const std::vector<std::string> labels = {
      "disk", "square", "triangle", "ring", "plus", "cross", "hbars", "vbars", "frame",
      "diamond"};
  return labels;
}

const std::vector<std::string>& KeywordLabels() {
  static const std::vector<std::string> labels = {"up", "down", "left", "right",
                                                  "on", "off",  "go",   "stop"};
  return labels;
}

Tensor RenderShape(std::size_t cls, std::mt19937_64& rng, std::size_t size) {
  if (cls >= ShapeLabels().size()) throw InvalidArgument("shape class out of range");
  const double s = static_cast<double>(size);
  const double radius = Uniform(rng, 0.25, 0.36) * s;
  const double cy = s / 2 + Uniform(rng, -0.12, 0.12) * s;
  const double cx = s / 2 + Uniform(rng, -0.12, 0.12) * s;
  const double angle = Uniform(rng, -0.15, 0.15);
  double fg = Uniform(rng, 0.65, 1.0), bg = Uniform(rng, 0.0, 0.2);
  if (Uniform(rng, 0.0, 1.0) < 0.5) std::swap(fg, bg);
  std::normal_distribution<double> noise(0.0, 0.04);
  Tensor img({1, size, size});
  const double ca = std::cos(angle), sa = std::sin(angle);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      // 2x2 supersampling for soft edges.
      int hits = 0;
      for (int sy = 0; sy < 2; ++sy)
        for (int sx = 0; sx < 2; ++sx) {
          const double py = (static_cast<double>(y) + 0.25 + 0.5 * sy - cy) / radius;
          const double px = (static_cast<double>(x) + 0.25 + 0.5 * sx - cx) / radius;
          const double u = ca * px + sa * py, v = -sa * px + ca * py;
          hits += Inside(cls, u, v) ? 1 : 0;
        }
      const double v = bg + (fg - bg) * hits / 4.0 + noise(rng);
      img.at(0, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

Tensor SynthesizeKeyword(std::size_t cls, std::mt19937_64& rng) {
  if (cls >= KeywordLabels().size()) throw InvalidArgument("keyword class out of range");
  const double sr = 16000.0;
  std::vector<double> wave(kClipSamples, 0.0);
  const double pitch = Uniform(rng, 0.92, 1.08);
  const double formant_shift = Uniform(rng, 0.95, 1.05);
  double t0 = Uniform(rng, 0.08, 0.22);
  double phase = 0.0;
  for (const Segment& seg : kKeywords[cls]) {
    const double dur = Uniform(rng, 0.25, 0.32);
    const std::size_t a = static_cast<std::size_t>(t0 * sr);
    const std::size_t b = std::min(kClipSamples, static_cast<std::size_t>((t0 + dur) * sr));
    const double formant = seg.formant * formant_shift;
    for (std::size_t i = a; i < b; ++i) {
      const double tau = static_cast<double>(i - a) / static_cast<double>(b - a);
      const double f0 = pitch * (seg.f0_start + (seg.f0_end - seg.f0_start) * tau);
      phase += 2 * kPi * f0 / sr;
      const double env = std::sin(kPi * tau);
      double v = 0.0;
      for (int h = 1; h * f0 < 3800; ++h) {
        const double fh = h * f0;
        const double gain = std::exp(-std::pow((fh - formant) / 250.0, 2)) + 0.15 / h;
        v += gain * std::sin(h * phase);
      }
      wave[i] += 0.25 * env * v;
    }
    t0 += dur + Uniform(rng, 0.03, 0.08);
  }
  std::normal_distribution<double> noise(0.0, 0.004);
  Tensor out({kClipSamples});
  for (std::size_t i = 0; i < kClipSamples; ++i)
    out[i] = static_cast<float>(std::clamp(wave[i] + noise(rng), -1.0, 1.0));
  return out;
}

LabeledSet MakeShapeSet(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledSet set;
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < ShapeLabels().size(); ++c) set.Add(RenderShape(c, rng), c);
  return set;
}

LabeledSet MakeKeywordSet(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledSet set;
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < KeywordLabels().size(); ++c)
      set.Add(SynthesizeKeyword(c, rng), c);
  return set;
}

Model ToyImageModel(std::uint64_t seed) {
  std::vector<LayerSpec> layers = {
      LayerSpec::Conv2d(1, 8, 3, 1, 1),   LayerSpec::Relu(), LayerSpec::MaxPool2d(2, 2),
      LayerSpec::Conv2d(8, 16, 3, 1, 1),  LayerSpec::Relu(),
      LayerSpec::Conv2d(16, 32, 3, 1, 1), LayerSpec::Relu(), LayerSpec::GlobalAvgPool(),
      LayerSpec::Dense(32, 10),           LayerSpec::Softmax()};
  const Shape input = {1, kShapeSize, kShapeSize};
  InitializeParameters(layers, input, seed);
  return Model(input, ShapeLabels(), std::move(layers), 5);
}

Model ToyAudioModel(std::uint64_t seed) {
  std::vector<LayerSpec> layers = {
      LayerSpec::Conv2d(1, 8, 3, 1, 1),   LayerSpec::Relu(), LayerSpec::MaxPool2d(2, 2),
      LayerSpec::Conv2d(8, 16, 3, 1, 1),  LayerSpec::Relu(), LayerSpec::MaxPool2d(2, 2),
      LayerSpec::Conv2d(16, 24, 3, 1, 1), LayerSpec::Relu(), LayerSpec::MaxPool2d(4, 4),
      LayerSpec::Conv2d(24, 16, 3, 1, 1), LayerSpec::Relu(), LayerSpec::Dense(16 * 7, 8),
      LayerSpec::Softmax()};
  const Shape input = {1, 98, 13};
  InitializeParameters(layers, input, seed);
  return Model(input, KeywordLabels(), std::move(layers), 9);
}

}  // namespace selfcheck
