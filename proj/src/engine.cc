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

#include "selfcheck/engine.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfcheck/error.h"

namespace selfcheck {
namespace {

// Output columns ox with 0 <= ox*stride + k - pad < width.
void ValidRange(std::size_t k, std::size_t pad, std::size_t stride, std::size_t in,
                std::size_t out, std::size_t* lo, std::size_t* hi) {
  // smallest ox with ox*stride >= pad - k
  std::size_t first = 0;
  if (pad > k) first = (pad - k + stride - 1) / stride;
  // largest ox with ox*stride + k - pad <= in - 1
  std::size_t last_exclusive = 0;
  if (in + pad > k) last_exclusive = (in + pad - k - 1) / stride + 1;
  *lo = std::min(first, out);
  *hi = std::min(last_exclusive, out);
  if (*hi < *lo) *hi = *lo;
}

Tensor Relu(const Tensor& in) {
  Tensor out = in;
  for (float& v : out.values()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor MaxPool(const Tensor& in, const LayerSpec& l) {
  Shape os = LayerOutputShape(l, in.shape());
  Tensor out(os);
  const std::size_t H = in.dim(1), W = in.dim(2);
  for (std::size_t c = 0; c < os[0]; ++c)
    for (std::size_t oy = 0; oy < os[1]; ++oy)
      for (std::size_t ox = 0; ox < os[2]; ++ox) {
        float best = -std::numeric_limits<float>::infinity();
        std::size_t y0 = oy * l.stride, x0 = ox * l.stride;
        for (std::size_t y = y0; y < std::min(y0 + l.kernel, H); ++y)
          for (std::size_t x = x0; x < std::min(x0 + l.kernel, W); ++x)
            best = std::max(best, in.at(c, y, x));
        out.at(c, oy, ox) = best;
      }
  return out;
}

Tensor GlobalAvgPool(const Tensor& in) {
  const std::size_t C = in.dim(0), plane = in.dim(1) * in.dim(2);
  Tensor out({C});
  for (std::size_t c = 0; c < C; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < plane; ++i) s += in[c * plane + i];
    out[c] = static_cast<float>(s / static_cast<double>(plane));
  }
  return out;
}

Tensor Dense(const Tensor& in, const LayerSpec& l) {
  if (in.size() != l.in_features)
    throw ShapeError("dense: expected " + std::to_string(l.in_features) + " inputs, got " +
                     std::to_string(in.size()));
  Tensor out({l.out_features});
  const float* x = in.data();
  for (std::size_t o = 0; o < l.out_features; ++o) {
    const float* w = l.weights.data() + o * l.in_features;
    double s = l.bias[o];
    for (std::size_t i = 0; i < l.in_features; ++i) s += static_cast<double>(w[i]) * x[i];
    out[o] = static_cast<float>(s);
  }
  return out;
}

Tensor Softmax(const Tensor& in) {
  if (in.rank() != 1) throw ShapeError("softmax expects a vector");
  float mx = *std::max_element(in.values().begin(), in.values().end());
  Tensor out(in.shape());
  double z = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) z += std::exp(static_cast<double>(in[i] - mx));
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = static_cast<float>(std::exp(static_cast<double>(in[i] - mx)) / z);
  return out;
}

void CheckInput(const Model& model, const Tensor& input) {
  if (input.shape() != model.input_shape())
    throw ShapeError("input shape " + ShapeString(input.shape()) +
                     " does not match model input " + ShapeString(model.input_shape()));
}

}  // namespace

std::size_t Argmax(std::span<const float> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

Tensor Conv2dForward(const Tensor& in, const LayerSpec& l) {
  if (l.kind != LayerKind::kConv2d) throw InvalidArgument("not a conv2d layer");
  if (in.rank() != 3 || in.dim(0) != l.in_channels)
    throw ShapeError("conv2d: channel mismatch, layer expects " +
                     std::to_string(l.in_channels) + " channels, input is " +
                     ShapeString(in.shape()));
  Shape os = LayerOutputShape(l, in.shape());
  const std::size_t C = l.in_channels, H = in.dim(1), W = in.dim(2);
  const std::size_t F = os[0], OH = os[1], OW = os[2], K = l.kernel, S = l.stride,
                    P = l.padding;
  Tensor out(os);
  std::vector<double> acc(OH * OW);
  for (std::size_t f = 0; f < F; ++f) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(l.bias[f]));
    for (std::size_t c = 0; c < C; ++c) {
      const float* plane = in.data() + c * H * W;
      for (std::size_t ky = 0; ky < K; ++ky) {
        std::size_t oy_lo, oy_hi;
        ValidRange(ky, P, S, H, OH, &oy_lo, &oy_hi);
        for (std::size_t kx = 0; kx < K; ++kx) {
          const double w = l.weights[((f * C + c) * K + ky) * K + kx];
          if (w == 0.0) continue;
          std::size_t ox_lo, ox_hi;
          ValidRange(kx, P, S, W, OW, &ox_lo, &ox_hi);
          if (ox_lo == ox_hi) continue;
          const std::size_t ix0 = ox_lo * S + kx - P;
          const std::size_t n = ox_hi - ox_lo;
          for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
            const float* src = plane + (oy * S + ky - P) * W + ix0;
            double* a = acc.data() + oy * OW + ox_lo;
            if (S == 1) {
              for (std::size_t j = 0; j < n; ++j) a[j] += w * src[j];
            } else {
              for (std::size_t j = 0; j < n; ++j) a[j] += w * src[j * S];
            }
          }
        }
      }
    }
    float* o = out.data() + f * OH * OW;
    for (std::size_t i = 0; i < OH * OW; ++i) o[i] = static_cast<float>(acc[i]);
  }
  return out;
}

Tensor LayerForward(const LayerSpec& layer, const Tensor& input) {
  switch (layer.kind) {
    case LayerKind::kConv2d: return Conv2dForward(input, layer);
    case LayerKind::kRelu: return Relu(input);
    case LayerKind::kMaxPool2d: return MaxPool(input, layer);
    case LayerKind::kGlobalAvgPool:
      if (input.rank() != 3) throw ShapeError("global-avg-pool expects [C,H,W]");
      return GlobalAvgPool(input);
    case LayerKind::kDense: return Dense(input, layer);
    case LayerKind::kSoftmax: return Softmax(input);
  }
  throw InvalidArgument("unknown layer kind");
}

Tensor RunLayers(const Model& model, Tensor x, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) x = LayerForward(model.layer(i), x);
  return x;
}

ForwardResult Forward(const Model& model, const Tensor& input,
                      const std::set<std::size_t>& tap_layers, PassCounter* counter) {
  CheckInput(model, input);
  for (std::size_t t : tap_layers)
    if (t >= model.num_layers())
      throw InvalidArgument("tap layer " + std::to_string(t) + " out of range");
  ForwardResult r;
  Tensor x = input;
  for (std::size_t i = 0; i < model.num_layers(); ++i) {
    x = LayerForward(model.layer(i), x);
    if (tap_layers.count(i)) r.taps.emplace(i, x);
  }
  r.predicted = Argmax(x.values());
  r.probabilities = std::move(x);
  if (counter) ++counter->full;
  return r;
}

ForwardResult ForwardHead(const Model& model, const Tensor& activations,
                          PassCounter* counter) {
  if (activations.shape() != model.activation_shape())
    throw ShapeError("head input " + ShapeString(activations.shape()) +
                     " does not match last-conv output " +
                     ShapeString(model.activation_shape()));
  ForwardResult r;
  r.probabilities =
      RunLayers(model, activations, model.activation_layer() + 1, model.num_layers());
  r.predicted = Argmax(r.probabilities.values());
  if (counter) ++counter->head;
  return r;
}

std::vector<Tensor> ForwardTrace(const Model& model, const Tensor& input,
                                 std::size_t through_layer) {
  CheckInput(model, input);
  if (through_layer >= model.num_layers())
    throw InvalidArgument("layer " + std::to_string(through_layer) + " out of range");
  std::vector<Tensor> trace;
  trace.reserve(through_layer + 2);
  trace.push_back(input);
  for (std::size_t i = 0; i <= through_layer; ++i)
    trace.push_back(LayerForward(model.layer(i), trace.back()));
  return trace;
}

ParamGrads::ParamGrads(const Model& model) {
  for (const LayerSpec& l : model.layers()) {
    weights.emplace_back(l.weights.size(), 0.0);
    bias.emplace_back(l.bias.size(), 0.0);
  }
}

void ParamGrads::Zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
}

namespace {

Tensor ConvBackward(const LayerSpec& l, const Tensor& in, const Tensor& g,
                    std::vector<double>* gw, std::vector<double>* gb) {
  const std::size_t C = l.in_channels, H = in.dim(1), W = in.dim(2);
  const std::size_t F = g.dim(0), OH = g.dim(1), OW = g.dim(2), K = l.kernel,
                    S = l.stride, P = l.padding;
  std::vector<double> gin(C * H * W, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    const float* gp = g.data() + f * OH * OW;
    if (gb) {
      double s = 0.0;
      for (std::size_t i = 0; i < OH * OW; ++i) s += gp[i];
      (*gb)[f] += s;
    }
    for (std::size_t c = 0; c < C; ++c) {
      const float* plane = in.data() + c * H * W;
      double* gplane = gin.data() + c * H * W;
      for (std::size_t ky = 0; ky < K; ++ky) {
        std::size_t oy_lo, oy_hi;
        ValidRange(ky, P, S, H, OH, &oy_lo, &oy_hi);
        for (std::size_t kx = 0; kx < K; ++kx) {
          const std::size_t widx = ((f * C + c) * K + ky) * K + kx;
          const double w = l.weights[widx];
          std::size_t ox_lo, ox_hi;
          ValidRange(kx, P, S, W, OW, &ox_lo, &ox_hi);
          double sw = 0.0;
          if (ox_lo == ox_hi) continue;
          const std::size_t ix0 = ox_lo * S + kx - P;
          const std::size_t n = ox_hi - ox_lo;
          for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
            const std::size_t base = (oy * S + ky - P) * W + ix0;
            const float* src = plane + base;
            double* dst = gplane + base;
            const float* grad = gp + oy * OW + ox_lo;
            for (std::size_t j = 0; j < n; ++j) {
              dst[j * S] += w * grad[j];
              sw += static_cast<double>(grad[j]) * src[j * S];
            }
          }
          if (gw) (*gw)[widx] += sw;
        }
      }
    }
  }
  Tensor out(in.shape());
  for (std::size_t i = 0; i < gin.size(); ++i) out[i] = static_cast<float>(gin[i]);
  return out;
}

Tensor MaxPoolBackward(const LayerSpec& l, const Tensor& in, const Tensor& g) {
  Tensor gin(in.shape());
  const std::size_t H = in.dim(1), W = in.dim(2);
  for (std::size_t c = 0; c < g.dim(0); ++c)
    for (std::size_t oy = 0; oy < g.dim(1); ++oy)
      for (std::size_t ox = 0; ox < g.dim(2); ++ox) {
        std::size_t y0 = oy * l.stride, x0 = ox * l.stride;
        std::size_t by = y0, bx = x0;
        float best = -std::numeric_limits<float>::infinity();
        for (std::size_t y = y0; y < std::min(y0 + l.kernel, H); ++y)
          for (std::size_t x = x0; x < std::min(x0 + l.kernel, W); ++x)
            if (in.at(c, y, x) > best) {
              best = in.at(c, y, x);
              by = y;
              bx = x;
            }
        gin.at(c, by, bx) += g.at(c, oy, ox);
      }
  return gin;
}

Tensor DenseBackward(const LayerSpec& l, const Tensor& in, const Tensor& g,
                     std::vector<double>* gw, std::vector<double>* gb) {
  std::vector<double> gin(l.in_features, 0.0);
  for (std::size_t o = 0; o < l.out_features; ++o) {
    const double go = g[o];
    if (gb) (*gb)[o] += go;
    if (go == 0.0) continue;
    const float* w = l.weights.data() + o * l.in_features;
    for (std::size_t i = 0; i < l.in_features; ++i) gin[i] += go * w[i];
    if (gw) {
      double* gwr = gw->data() + o * l.in_features;
      for (std::size_t i = 0; i < l.in_features; ++i) gwr[i] += go * in[i];
    }
  }
  Tensor out(in.shape());
  for (std::size_t i = 0; i < gin.size(); ++i) out[i] = static_cast<float>(gin[i]);
  return out;
}

}  // namespace

Tensor Backward(const Model& model, const std::vector<Tensor>& trace,
                std::size_t top_layer, Tensor grad, ParamGrads* grads) {
  if (trace.size() < top_layer + 2)
    throw InvalidArgument("trace does not reach layer " + std::to_string(top_layer));
  if (grad.shape() != trace[top_layer + 1].shape())
    throw ShapeError("gradient shape " + ShapeString(grad.shape()) +
                     " does not match layer output " +
                     ShapeString(trace[top_layer + 1].shape()));
  for (std::size_t i = top_layer + 1; i-- > 0;) {
    const LayerSpec& l = model.layer(i);
    const Tensor& in = trace[i];
    const Tensor& out = trace[i + 1];
    switch (l.kind) {
      case LayerKind::kConv2d:
        grad = ConvBackward(l, in, grad, grads ? &grads->weights[i] : nullptr,
                            grads ? &grads->bias[i] : nullptr);
        break;
      case LayerKind::kRelu:
        for (std::size_t j = 0; j < grad.size(); ++j)
          if (!(in[j] > 0.0f)) grad[j] = 0.0f;
        break;
      case LayerKind::kMaxPool2d:
        grad = MaxPoolBackward(l, in, grad);
        break;
      case LayerKind::kGlobalAvgPool: {
        Tensor gin(in.shape());
        const std::size_t plane = in.dim(1) * in.dim(2);
        for (std::size_t c = 0; c < in.dim(0); ++c)
          for (std::size_t k = 0; k < plane; ++k)
            gin[c * plane + k] = grad[c] / static_cast<float>(plane);
        grad = std::move(gin);
        break;
      }
      case LayerKind::kDense:
        grad = DenseBackward(l, in, grad, grads ? &grads->weights[i] : nullptr,
                             grads ? &grads->bias[i] : nullptr);
        break;
      case LayerKind::kSoftmax: {
        double dot = 0.0;
        for (std::size_t j = 0; j < grad.size(); ++j)
          dot += static_cast<double>(grad[j]) * out[j];
        for (std::size_t j = 0; j < grad.size(); ++j)
          grad[j] = static_cast<float>(out[j] * (grad[j] - dot));
        break;
      }
    }
  }
  return grad;
}

Tensor InputGradient(const Model& model, const Tensor& input, const Objective& objective) {
  if (objective.layer >= model.num_layers())
    throw InvalidArgument("objective layer " + std::to_string(objective.layer) +
                          " out of range");
  const Shape& os = model.output_shape(objective.layer);
  if (objective.index >= NumElements(os))
    throw InvalidArgument("objective index " + std::to_string(objective.index) +
                          " out of range for layer output " + ShapeString(os));
  std::vector<Tensor> trace = ForwardTrace(model, input, objective.layer);
  Tensor seed(os);
  seed[objective.index] = 1.0f;
  return Backward(model, trace, objective.layer, std::move(seed));
}

}  // namespace selfcheck
