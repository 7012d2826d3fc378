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

#include "selfcheck/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "selfcheck/engine.h"
#include "selfcheck/error.h"

namespace selfcheck {

namespace {

// Returns d(-log p[label]) / d(logits) and the loss.
Tensor LogitGradient(const Tensor& probs, std::size_t label, double* loss) {
  Tensor g = probs;
  g[label] -= 1.0f;
  if (loss) *loss = -std::log(std::max(static_cast<double>(probs[label]), 1e-30));
  return g;
}

void CheckSoftmaxHead(const Model& model) {
  if (model.layers().back().kind != LayerKind::kSoftmax)
    throw InvalidArgument("cross-entropy needs a model ending in softmax");
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs == 0 || batch == 0) throw InvalidArgument("epochs and batch must be >= 1");
  if (!(learning_rate > 0)) throw InvalidArgument("learning rate must be > 0");
}

void InitializeParameters(std::vector<LayerSpec>& layers, const Shape& input_shape,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Shape in = input_shape;
  for (LayerSpec& l : layers) {
    if (l.HasParameters()) {
      const std::size_t fan_in = l.kind == LayerKind::kConv2d
                                     ? l.in_channels * l.kernel * l.kernel
                                     : l.in_features;
      const float a = static_cast<float>(std::sqrt(6.0 / static_cast<double>(fan_in)));
      std::uniform_real_distribution<float> u(-a, a);
      for (float& w : l.weights) w = u(rng);
      std::fill(l.bias.begin(), l.bias.end(), 0.0f);
    }
    in = LayerOutputShape(l, in);
  }
}

Tensor CrossEntropyInputGradient(const Model& model, const Tensor& input, std::size_t label,
                                 double* loss) {
  CheckSoftmaxHead(model);
  if (label >= model.num_classes()) throw InvalidArgument("label out of range");
  const std::size_t top = model.logits_layer();
  std::vector<Tensor> trace = ForwardTrace(model, input, top);
  Tensor probs = LayerForward(model.layers().back(), trace.back());
  return Backward(model, trace, top, LogitGradient(probs, label, loss));
}

Model Train(const Model& init, const LabeledSet& data, const TrainConfig& cfg,
            TrainStats* stats) {
  cfg.Validate();
  CheckSoftmaxHead(init);
  if (data.empty()) throw InvalidArgument("training set is empty");
  std::vector<LayerSpec> layers = init.layers();
  const std::size_t L = layers.size();
  std::vector<std::vector<double>> mw(L), vw(L), mb(L), vb(L);
  for (std::size_t i = 0; i < L; ++i) {
    mw[i].assign(layers[i].weights.size(), 0.0);
    vw[i].assign(layers[i].weights.size(), 0.0);
    mb[i].assign(layers[i].bias.size(), 0.0);
    vb[i].assign(layers[i].bias.size(), 0.0);
  }
  auto adam = [&](std::vector<float>& p, std::vector<double>& m, std::vector<double>& v,
                  const std::vector<double>& g, double scale, double c1, double c2) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j] * scale;
      m[j] = cfg.beta1 * m[j] + (1 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1 - cfg.beta2) * gj * gj;
      p[j] -= static_cast<float>(cfg.learning_rate * (m[j] / c1) /
                                 (std::sqrt(v[j] / c2) + cfg.epsilon));
    }
  };

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Model model = init;
  ParamGrads grads(model);
  std::size_t t = 0;
  const std::size_t top = model.logits_layer();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      grads.Zero();
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        std::vector<Tensor> trace = ForwardTrace(model, data.inputs[idx], top);
        Tensor probs = LayerForward(model.layers().back(), trace.back());
        double loss = 0.0;
        Backward(model, trace, top, LogitGradient(probs, data.labels[idx], &loss), &grads);
        if (!std::isfinite(loss))
          throw NonFinite("training loss is not finite", static_cast<int>(epoch));
        total += loss;
      }
      ++t;
      const double c1 = 1 - std::pow(cfg.beta1, static_cast<double>(t));
      const double c2 = 1 - std::pow(cfg.beta2, static_cast<double>(t));
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = 0; i < L; ++i) {
        if (!layers[i].HasParameters()) continue;
        adam(layers[i].weights, mw[i], vw[i], grads.weights[i], scale, c1, c2);
        adam(layers[i].bias, mb[i], vb[i], grads.bias[i], scale, c1, c2);
      }
      model = Model(model.input_shape(), model.labels(), layers, model.last_conv());
    }
    if (stats) stats->epoch_loss.push_back(total / static_cast<double>(data.size()));
  }
  return model;
}

double Accuracy(const Model& model, const LabeledSet& data) {
  if (data.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (Forward(model, data.inputs[i]).predicted == data.labels[i]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

}  // namespace selfcheck
