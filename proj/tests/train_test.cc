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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "oracles.h"
#include "selfcheck/engine.h"
#include "selfcheck/error.h"
#include "selfcheck/synthetic.h"
#include "selfcheck/train.h"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

double CrossEntropy(const Model& m, const Tensor& x, std::size_t label) {
  return -std::log(static_cast<double>(Forward(m, x).probabilities[label]));
}

// Two classes separated by which half of an 8-vector is brighter.
LabeledSet Halves(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  LabeledSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 2;
    Tensor x({1, 1, 8});
    for (std::size_t j = 0; j < 8; ++j) x[j] = u(rng) * 0.5f + ((j < 4) == (c == 0) ? 0.5f : 0.0f);
    s.Add(std::move(x), c);
  }
  return s;
}

Model HalvesNet(std::uint64_t seed) {
  std::vector<LayerSpec> layers = {LayerSpec::Conv2d(1, 2, 1), LayerSpec::Relu(),
                                   LayerSpec::Dense(16, 2), LayerSpec::Softmax()};
  InitializeParameters(layers, {1, 1, 8}, seed);
  return Model({1, 1, 8}, {"left", "right"}, std::move(layers), 0);
}

}  // namespace

TEST_CASE("init: He-uniform bound, zero bias, seed-determined") {
  std::vector<LayerSpec> a = {LayerSpec::Conv2d(3, 4, 3), LayerSpec::Relu(),
                              LayerSpec::GlobalAvgPool(), LayerSpec::Dense(4, 2)};
  std::vector<LayerSpec> b = a, c = a;
  InitializeParameters(a, {3, 8, 8}, 5);
  InitializeParameters(b, {3, 8, 8}, 5);
  InitializeParameters(c, {3, 8, 8}, 6);
  CHECK(a[0].weights == b[0].weights);
  CHECK(a[0].weights != c[0].weights);
  const float conv_bound = std::sqrt(6.0f / 27.0f), dense_bound = std::sqrt(6.0f / 4.0f);
  for (float w : a[0].weights) CHECK(std::abs(w) <= conv_bound);
  for (float w : a[3].weights) CHECK(std::abs(w) <= dense_bound);
  for (float v : a[0].bias) CHECK(v == 0.0f);
}

TEST_CASE("cross-entropy input gradient matches central differences") {
  Model m = SmallConvNet(12);
  std::mt19937_64 rng(13);
  Tensor x = RandomTensor(m.input_shape(), rng, 0.0f, 1.0f);
  double loss = 0.0;
  Tensor g = CrossEntropyInputGradient(m, x, 1, &loss);
  CHECK(loss == doctest::Approx(CrossEntropy(m, x, 1)).epsilon(1e-5));
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t i = pick(rng);
    const float h = 1e-3f;
    Tensor xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (CrossEntropy(m, xp, 1) - CrossEntropy(m, xm, 1)) / (2.0 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(2e-2).scale(1e-2));
  }
}

TEST_CASE("train: loss falls and a separable toy task is learned") {
  LabeledSet data = Halves(64, 1);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch = 8;
  cfg.learning_rate = 1e-2;
  TrainStats stats;
  Model m = Train(HalvesNet(2), data, cfg, &stats);
  REQUIRE(stats.epoch_loss.size() == 30);
  CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
  CHECK(Accuracy(m, Halves(40, 9)) >= 0.95);
}

TEST_CASE("train: deterministic under a fixed seed") {
  LabeledSet data = Halves(16, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch = 4;
  cfg.seed = 7;
  Model a = Train(HalvesNet(1), data, cfg);
  Model b = Train(HalvesNet(1), data, cfg);
  for (std::size_t l = 0; l < a.layers().size(); ++l) CHECK(a.layers()[l].weights == b.layers()[l].weights);
}

TEST_CASE("train: bad config and empty data are rejected") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(Train(HalvesNet(1), Halves(4, 1), cfg), InvalidArgument);
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(Train(HalvesNet(1), Halves(4, 1), cfg), InvalidArgument);
  CHECK_THROWS_AS(Train(HalvesNet(1), LabeledSet{}, TrainConfig{}), InvalidArgument);
}

TEST_CASE("synthetic shapes: range, size and labels") {
  std::mt19937_64 rng(1);
  for (std::size_t c = 0; c < ShapeLabels().size(); ++c) {
    Tensor img = RenderShape(c, rng);
    CHECK(img.shape() == Shape{1, kShapeSize, kShapeSize});
    for (float v : img.values()) CHECK((v >= 0.0f && v <= 1.0f));
  }
  LabeledSet s = MakeShapeSet(3, 4);
  CHECK(s.size() == 30);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.labels[i] == i % 10);
  LabeledSet t = MakeShapeSet(3, 4);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.inputs[i].values()[5] == t.inputs[i].values()[5]);
  CHECK_THROWS(RenderShape(10, rng));
}

TEST_CASE("synthetic keywords: clip length, range and distinct classes") {
  std::mt19937_64 rng(2);
  Tensor a = SynthesizeKeyword(0, rng), b = SynthesizeKeyword(7, rng);
  CHECK(a.shape() == Shape{kClipSamples});
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] >= -1.0f && a[i] <= 1.0f));
    diff += std::abs(a[i] - b[i]);
  }
  CHECK(diff > 1.0);
  CHECK(KeywordLabels().size() == 8);
  CHECK(MakeKeywordSet(2, 1).size() == 16);
}

TEST_CASE("toy models: tap and input shapes") {
  Model img = ToyImageModel(1);
  CHECK(img.input_shape() == Shape{1, 32, 32});
  CHECK(img.activation_shape() == Shape{32, 16, 16});
  CHECK(img.num_classes() == 10);
  Model aud = ToyAudioModel(1);
  CHECK(aud.input_shape() == Shape{1, 98, 13});
  CHECK(aud.num_classes() == 8);
  CHECK(aud.activation_layer() == aud.last_conv() + 1);
}
