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
#include "selfcheck/error.h"
#include "selfcheck/interpret.h"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

double L2(const Tensor& t) {
  double s = 0;
  for (float v : t.values()) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("activation maximization: linear objective rises every step") {
  Model m = LinearNet({0.5f, -0.25f, 0.75f, -0.5f, 0.3f, 0.1f}, 6, 1);
  AmConfig cfg;
  cfg.steps = 10;
  cfg.eta = 0.01;
  AmResult r = ActivationMaximization(m, Objective::Neuron(1, 0), cfg);
  REQUIRE(r.trace.size() == 11);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] > r.trace[i - 1]);
  CHECK(r.final_activation == r.trace.back());
}

TEST_CASE("activation maximization: eta = 0 returns the initialization") {
  Model m = SmallConvNet(4);
  AmConfig cfg;
  cfg.eta = 0.0;
  cfg.steps = 5;
  cfg.seed = 42;
  AmResult r = ActivationMaximization(m, Objective::Neuron(3, 7), cfg);
  AmConfig none = cfg;
  none.steps = 0;
  AmResult init = ActivationMaximization(m, Objective::Neuron(3, 7), none);
  CHECK(r.pattern == init.pattern);
  for (float v : init.pattern.values()) {
    CHECK(v >= 0.49f);
    CHECK(v <= 0.51f);
  }
}

TEST_CASE("activation maximization: regularization lowers activation and norm") {
  Model m = SmallConvNet(12);
  const Objective neuron = Objective::Neuron(3, 9);
  AmConfig plain;
  plain.steps = 50;
  plain.eta = 0.1;
  plain.seed = 1;
  AmConfig reg = plain;
  reg.regularized = true;
  reg.lambda = 0.05;
  AmResult a = ActivationMaximization(m, neuron, plain);
  AmResult b = ActivationMaximization(m, neuron, reg);
  CHECK(a.final_activation >= b.final_activation);

  AmConfig heavy = reg;
  heavy.lambda = 1e3;
  AmResult c = ActivationMaximization(m, neuron, heavy);
  CHECK(L2(c.pattern) < L2(a.pattern));
}

TEST_CASE("activation maximization: patterns stay in [0,1], bad configs rejected") {
  Model m = SmallConvNet(6);
  AmConfig cfg;
  cfg.eta = 5.0;
  AmResult r = ActivationMaximization(m, Objective::Neuron(0, 3), cfg);
  for (float v : r.pattern.values()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  cfg.eta = -1;
  CHECK_THROWS_AS(ActivationMaximization(m, Objective::Neuron(0, 3), cfg), InvalidArgument);
  CHECK_THROWS_AS(ActivationMaximization(m, Objective::Neuron(0, 9999), AmConfig{}),
                  InvalidArgument);
}

TEST_CASE("cam: single channel, hand sum, zeros, rank") {
  Tensor one({1, 2, 2}, {1, 2, 3, 4});
  CHECK(Cam(one) == Tensor({2, 2}, {1, 2, 3, 4}));
  Tensor two({2, 2, 2}, {1, 2, 3, 4, 10, 20, 30, 40});
  CHECK(Cam(two) == Tensor({2, 2}, {11, 22, 33, 44}));
  CHECK(Cam(Tensor({5, 3, 3})) == Tensor({3, 3}));
  CHECK_THROWS_AS(Cam(Tensor({4, 4})), ShapeError);
}

TEST_CASE("cam: linear in the taps") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    Tensor a = RandomTensor({6, 4, 5}, rng), b = RandomTensor({6, 4, 5}, rng);
    const float ca = 1.7f, cb = -0.6f;
    Tensor mix(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = ca * a[i] + cb * b[i];
    Tensor lhs = Cam(mix), ha = Cam(a), hb = Cam(b);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(std::abs(lhs[i] - (ca * ha[i] + cb * hb[i])) < 1e-5);
  }
}

TEST_CASE("localize: single hot cell maps through the stride") {
  Tensor heat({8, 8});
  heat.at(2, 3) = 5.0f;
  Region r = LocalizePrimaryRegion(heat, {1, 32, 32}, 0.7);
  CHECK(r == Region{8, 12, 4, 4});
}

TEST_CASE("localize: uniform heatmap covers the whole image") {
  Region r = LocalizePrimaryRegion(Tensor({8, 8}, 2.0f), {3, 32, 32}, 0.7);
  CHECK(r == Region{0, 0, 32, 32});
}

TEST_CASE("localize: equal maxima pick the lowest (row, col) component") {
  Tensor heat({8, 8});
  heat.at(5, 1) = 3.0f;
  heat.at(1, 6) = 3.0f;
  heat.at(1, 5) = 2.5f;
  Region r = LocalizePrimaryRegion(heat, {32, 32}, 0.7);
  CHECK(r == Region{4, 20, 4, 8});
}

TEST_CASE("localize: only the component touching the peak counts") {
  Tensor heat({4, 4});
  heat.at(0, 0) = 10.0f;
  heat.at(0, 1) = 8.0f;
  heat.at(3, 3) = 9.0f;
  Region r = LocalizePrimaryRegion(heat, {1, 8, 8}, 0.5);
  CHECK(r == Region{0, 0, 2, 4});
}

TEST_CASE("localize: non-divisible stride clips to bounds; zero heatmap signals") {
  Tensor heat({3, 3});
  heat.at(2, 2) = 1.0f;
  Region r = LocalizePrimaryRegion(heat, {1, 10, 10}, 0.7);
  CHECK(r.top + r.height <= 10);
  CHECK(r.left + r.width <= 10);
  CHECK(r.area() > 0);
  CHECK_THROWS_AS(LocalizePrimaryRegion(Tensor({3, 3}), {1, 9, 9}, 0.7), NoPrimarySource);
  CHECK_THROWS_AS(LocalizePrimaryRegion(heat, {1, 9, 9}, 1.0), InvalidArgument);
}

TEST_CASE("localize: property, boxes are in bounds and contain the peak") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> a(0.05, 0.95);
  for (int t = 0; t < 200; ++t) {
    Tensor heat = RandomTensor({7, 5}, rng, -1.0f, 1.0f);
    heat[3] = std::abs(heat[3]) + 0.01f;
    Region r = LocalizePrimaryRegion(heat, {2, 28, 20}, a(rng));
    CHECK(r.area() > 0);
    CHECK(r.top + r.height <= 28);
    CHECK(r.left + r.width <= 20);
    std::size_t peak = Argmax(heat.values());
    CHECK(r.Contains((peak / 5) * 4, (peak % 5) * 4));
  }
}
