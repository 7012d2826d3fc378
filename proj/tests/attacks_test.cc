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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "oracles.h"
#include "selfcheck/attacks.h"
#include "selfcheck/engine.h"
#include "selfcheck/error.h"
#include "selfcheck/evidence.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/synthetic.h"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

std::size_t CountDiffs(const Tensor& a, const Tensor& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

double MaxAbsDiff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - b[i]));
  return m;
}

LabeledSet RandomPool(const Model& m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledSet s;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor x = RandomTensor(m.input_shape(), rng, 0.0f, 1.0f);
    const std::size_t c = Forward(m, x).predicted;
    s.Add(std::move(x), c);
  }
  return s;
}

Tensor Tone(std::size_t n, double amp) {
  Tensor w({n});
  for (std::size_t i = 0; i < n; ++i)
    w[i] = static_cast<float>(amp * std::sin(2.0 * M_PI * 440.0 * double(i) / 16000.0));
  return w;
}

}  // namespace

TEST_CASE("apply_patch: zero-size patch leaves the image unchanged") {
  std::mt19937_64 rng(1);
  Tensor img = RandomTensor({1, 4, 4}, rng, 0.0f, 1.0f);
  Tensor out = ApplyPatch(img, NoisePatch(1, 0, rng), 2, 2);
  CHECK(CountDiffs(img, out) == 0);
}

TEST_CASE("apply_patch: full-image patch replaces everything") {
  std::mt19937_64 rng(2);
  Tensor img = RandomTensor({3, 5, 5}, rng, 0.0f, 0.5f);
  Tensor patch = RandomTensor({3, 5, 5}, rng, 0.6f, 1.0f);
  Tensor out = ApplyPatch(img, patch, 0, 0);
  CHECK(CountDiffs(out, patch) == 0);
}

TEST_CASE("apply_patch: 2x2 at (1,1) on 4x4 replaces exactly four pixels") {
  Tensor img({1, 4, 4}, std::vector<float>(16, 0.0f));
  Tensor patch({1, 2, 2}, std::vector<float>(4, 1.0f));
  Tensor out = ApplyPatch(img, patch, 1, 1);
  CHECK(CountDiffs(img, out) == 4);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x) {
      const bool inside = y >= 1 && y <= 2 && x >= 1 && x <= 2;
      CHECK(out.at(0, y, x) == (inside ? 1.0f : 0.0f));
    }
}

TEST_CASE("apply_patch: out-of-bounds or channel mismatch is rejected") {
  Tensor img({1, 4, 4});
  CHECK_THROWS_AS(ApplyPatch(img, Tensor({1, 2, 2}), 3, 0), InvalidArgument);
  CHECK_THROWS_AS(ApplyPatch(img, Tensor({1, 5, 5}), 0, 0), InvalidArgument);
  CHECK_THROWS(ApplyPatch(img, Tensor({2, 2, 2}), 0, 0));
}

TEST_CASE("noise patch and random location stay in range") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    Tensor p = NoisePatch(3, 5, rng);
    CHECK(p.shape() == Shape{3, 5, 5});
    for (float v : p.values()) CHECK((v >= 0.0f && v <= 1.0f));
    auto [top, left] = RandomLocation({3, 9, 7}, 5, rng);
    CHECK(top + 5 <= 9);
    CHECK(left + 5 <= 7);
  }
}

TEST_CASE("optimize_patch: zero steps returns the noise initialization") {
  Model m = SmallConvNet(4);
  LabeledSet pool = RandomPool(m, 6, 5);
  PatchSpec spec;
  spec.size = 3;
  PatchOptimization r = OptimizePatch(m, 1, spec, 0, 0.05, pool, 77);
  std::mt19937_64 rng(77);
  Tensor init = NoisePatch(2, 3, rng);
  CHECK(CountDiffs(r.patch, init) == 0);
  CHECK(r.objective.size() == 1);
}

TEST_CASE("optimize_patch: objective is non-decreasing and the patch stays in [0,1]") {
  Model m = SmallConvNet(6);
  LabeledSet pool = RandomPool(m, 8, 7);
  PatchSpec spec;
  spec.size = 3;
  PatchOptimization r = OptimizePatch(m, 2, spec, 40, 0.05, pool, 8);
  CHECK(r.objective.size() == 41);
  for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] >= r.objective[i - 1]);
  for (float v : r.patch.values()) CHECK((v >= 0.0f && v <= 1.0f));
  CHECK(r.fooling_rate >= 0.0);
  CHECK(r.fooling_rate <= 1.0);
}

TEST_CASE("optimize_patch: beats random patches of the same size") {
  Model m = SmallConvNet(9);
  LabeledSet pool = RandomPool(m, 12, 10);
  PatchSpec spec;
  spec.size = 3;
  spec.random_location = false;
  spec.top = 1;
  spec.left = 1;
  for (std::size_t target = 0; target < 3; ++target) {
    PatchOptimization r = OptimizePatch(m, target, spec, 200, 0.05, pool, 11 + target);
    std::vector<std::pair<std::size_t, std::size_t>> at(pool.size(), {1, 1});
    std::mt19937_64 rng(100 + target);
    for (int t = 0; t < 5; ++t) {
      const double random_rate = FoolingRate(m, NoisePatch(2, 3, rng), target, pool, at);
      CHECK(r.fooling_rate >= random_rate);
    }
  }
}

TEST_CASE("optimize_patch: bad target or empty pool") {
  Model m = SmallConvNet(4);
  PatchSpec spec;
  spec.size = 3;
  CHECK_THROWS_AS(OptimizePatch(m, 3, spec, 1, 0.1, RandomPool(m, 2, 1), 1), InvalidArgument);
  CHECK_THROWS_AS(OptimizePatch(m, 0, spec, 1, 0.1, LabeledSet{}, 1), InvalidArgument);
}

TEST_CASE("fgsm/bim: epsilon 0 is a no-op") {
  Model m = ToyAudioModel(1);
  Tensor w = Tone(kClipSamples, 0.3);
  CHECK(CountDiffs(FgsmAudio(m, w, 0.0), w) == 0);
  CHECK(CountDiffs(BimAudio(m, w, 0.0, 0.001, 5), w) == 0);
}

TEST_CASE("fgsm/bim: perturbation stays in the eps ball and in [-1,1]") {
  Model m = ToyAudioModel(2);
  std::mt19937_64 rng(3);
  Tensor w = SynthesizeKeyword(2, rng);
  for (float& v : w.values()) v = std::clamp(v * 3.0f, -1.0f, 1.0f);  // some clipped samples
  for (double eps : {0.001, 0.01}) {
    Tensor f = FgsmAudio(m, w, eps);
    Tensor b = BimAudio(m, w, eps, eps / 4, 6);
    Tensor t = BimAudio(m, w, eps, eps / 4, 6, std::size_t{5});
    for (const Tensor* x : {&f, &b, &t}) {
      CHECK(MaxAbsDiff(*x, w) <= eps + 1e-7);
      for (float v : x->values()) CHECK((v >= -1.0f && v <= 1.0f));
    }
    CHECK(CountDiffs(f, w) > 0);
  }
}

TEST_CASE("fgsm: moves the true-class loss up") {
  Model m = ToyAudioModel(4);
  std::mt19937_64 rng(5);
  Tensor w = SynthesizeKeyword(1, rng);
  const std::size_t c = Forward(m, AudioFeatures(m, w, {})).predicted;
  const double before = Forward(m, AudioFeatures(m, w, {})).probabilities[c];
  Tensor adv = FgsmAudio(m, w, 0.01, std::nullopt, c);
  const double after = Forward(m, AudioFeatures(m, adv, {})).probabilities[c];
  CHECK(after < before);
}

TEST_CASE("fgsm/bim: invalid inputs") {
  Model m = ToyAudioModel(1);
  Tensor w = Tone(kClipSamples, 0.3);
  CHECK_THROWS_AS(FgsmAudio(m, w, -0.1), InvalidArgument);
  Tensor loud = Tone(kClipSamples, 0.3);
  loud[10] = 1.5f;
  CHECK_THROWS_AS(FgsmAudio(m, loud, 0.01), InvalidArgument);
  CHECK_THROWS_AS(FgsmAudio(m, Tensor({2, 8}), 0.01), ShapeError);
}
