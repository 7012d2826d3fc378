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

#include "selfcheck/interpret.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "selfcheck/error.h"

namespace selfcheck {

void AmConfig::Validate() const {
  if (steps < 0) throw InvalidArgument("activation maximization: steps must be >= 0");
  if (eta < 0) throw InvalidArgument("activation maximization: eta must be >= 0");
  if (lambda < 0) throw InvalidArgument("activation maximization: lambda must be >= 0");
}

namespace {

// y = (I + c (I + Lap)) x per channel plane, where Lap is the 4-neighbor
// graph Laplacian, so that d/dX (||X||^2 + TV(X)) = 2 (X + Lap X).
void ApplyPenaltySystem(const std::vector<double>& x, double c, std::size_t H, std::size_t W,
                        std::vector<double>& y) {
  const std::size_t planes = x.size() / (H * W);
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t base = p * H * W;
    for (std::size_t r = 0; r < H; ++r)
      for (std::size_t q = 0; q < W; ++q) {
        const std::size_t i = base + r * W + q;
        double lap = 0.0;
        if (q > 0) lap += x[i] - x[i - 1];
        if (q + 1 < W) lap += x[i] - x[i + 1];
        if (r > 0) lap += x[i] - x[i - W];
        if (r + 1 < H) lap += x[i] - x[i + W];
        y[i] = x[i] + c * (x[i] + lap);
      }
  }
}

// Implicit (proximal) penalty step: solves (I + 2 eta lambda (I + Lap)) X = B
// by conjugate gradients. Stable for any lambda, unlike an explicit step.
Tensor PenaltyProx(const Tensor& b_in, double c) {
  const Shape& s = b_in.shape();
  const std::size_t W = s.back();
  const std::size_t H = s.size() >= 2 ? s[s.size() - 2] : 1;
  const std::size_t n = b_in.size();
  std::vector<double> b(b_in.values().begin(), b_in.values().end());
  std::vector<double> x(n), r(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / (1.0 + c);
  ApplyPenaltySystem(x, c, H, W, ap);
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - ap[i];
    p[i] = r[i];
    rr += r[i] * r[i];
    bb += b[i] * b[i];
  }
  for (int it = 0; it < 200 && rr > 1e-20 * std::max(bb, 1e-30); ++it) {
    ApplyPenaltySystem(p, c, H, W, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double step = rr / pap;
    double rr_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
      rr_next += r[i] * r[i];
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  Tensor out(s);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(x[i]);
  return out;
}

double NeuronValue(const Model& model, const Tensor& x, const Objective& neuron) {
  return RunLayers(model, x, 0, neuron.layer + 1)[neuron.index];
}

}  // namespace

AmResult ActivationMaximization(const Model& model, const Objective& neuron, const AmConfig& cfg) {
  cfg.Validate();
  if (neuron.layer >= model.num_layers() ||
      neuron.index >= NumElements(model.output_shape(neuron.layer)))
    throw InvalidArgument("activation maximization: invalid neuron");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<float> noise(-0.01f, 0.01f);
  Tensor x(model.input_shape(), 0.5f);
  for (float& v : x.values()) v += noise(rng);

  AmResult r;
  r.trace.push_back(NeuronValue(model, x, neuron));
  for (int step = 1; step <= cfg.steps; ++step) {
    Tensor g = InputGradient(model, x, neuron);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = static_cast<float>(x[i] + cfg.eta * g[i]);
    if (cfg.regularized && cfg.lambda > 0.0 && cfg.eta > 0.0)
      g = PenaltyProx(g, 2.0 * cfg.eta * cfg.lambda);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(g[i], 0.0f, 1.0f);
    double a = NeuronValue(model, x, neuron);
    if (!std::isfinite(a))
      throw NonFinite("activation maximization: non-finite activation at step " +
                          std::to_string(step),
                      step);
    r.trace.push_back(a);
  }
  r.final_activation = r.trace.back();
  r.pattern = std::move(x);
  return r;
}

Tensor Cam(const Tensor& taps) {
  if (taps.rank() != 3) throw ShapeError("cam expects a [K,H,W] tap, got " + ShapeString(taps.shape()));
  const std::size_t K = taps.dim(0), H = taps.dim(1), W = taps.dim(2);
  Tensor out({H, W});
  for (std::size_t i = 0; i < H * W; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += taps[k * H * W + i];
    out[i] = static_cast<float>(s);
  }
  return out;
}

Region LocalizePrimaryRegion(const Tensor& heatmap, const Shape& input_shape, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("localize: alpha must be in (0, 1)");
  if (heatmap.rank() != 2) throw ShapeError("localize: heatmap must be 2-D");
  if (input_shape.size() < 2) throw ShapeError("localize: input must be at least 2-D");
  const std::size_t IH = input_shape[input_shape.size() - 2], IW = input_shape.back();
  const std::size_t H = heatmap.dim(0), W = heatmap.dim(1);
  const std::size_t peak = Argmax(heatmap.values());
  const float mx = heatmap[peak];
  if (!(mx > 0.0f)) throw NoPrimarySource("heatmap has no positive activation");
  const double thr = alpha * mx;

  std::vector<std::uint8_t> seen(H * W, 0);
  std::vector<std::size_t> stack{peak};
  seen[peak] = 1;
  std::size_t y0 = H, y1 = 0, x0 = W, x1 = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const std::size_t y = i / W, x = i % W;
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const long ny = static_cast<long>(y) + dy, nx = static_cast<long>(x) + dx;
        if (ny < 0 || nx < 0 || ny >= static_cast<long>(H) || nx >= static_cast<long>(W)) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * W + static_cast<std::size_t>(nx);
        if (!seen[j] && heatmap[j] >= thr) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
  }
  const std::size_t sy = std::max<std::size_t>(1, IH / H), sx = std::max<std::size_t>(1, IW / W);
  Region r;
  r.top = std::min(y0 * sy, IH - 1);
  r.left = std::min(x0 * sx, IW - 1);
  r.height = std::min((y1 + 1) * sy, IH) - r.top;
  r.width = std::min((x1 + 1) * sx, IW) - r.left;
  return r;
}

}  // namespace selfcheck
