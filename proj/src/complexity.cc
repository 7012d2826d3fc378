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

#include "selfcheck/complexity.h"

#include <bit>
#include <cstdio>
#include <sstream>

#include "selfcheck/error.h"
#include "selfcheck/fft.h"

namespace selfcheck {

namespace {

std::uint64_t Log2Ceil(std::size_t n) {
  return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1));
}

LayerSpec Shell(LayerKind kind) {
  LayerSpec l;
  l.kind = kind;
  return l;
}

LayerSpec ConvShell(std::size_t in, std::size_t out, std::size_t k, std::size_t pad) {
  LayerSpec l = Shell(LayerKind::kConv2d);
  l.in_channels = in;
  l.out_channels = out;
  l.kernel = k;
  l.padding = pad;
  return l;
}

LayerSpec DenseShell(std::size_t in, std::size_t out) {
  LayerSpec l = Shell(LayerKind::kDense);
  l.in_features = in;
  l.out_features = out;
  return l;
}

}  // namespace

LayerTable TableOf(const Model& model) {
  LayerTable t{model.input_shape(), {}, model.last_conv()};
  for (const LayerSpec& l : model.layers()) {
    LayerSpec s = l;
    s.weights.clear();
    s.bias.clear();
    t.layers.push_back(std::move(s));
  }
  return t;
}

LayerTable Vgg16Table(std::size_t image, std::size_t classes) {
  LayerTable t;
  t.input_shape = {3, image, image};
  const std::vector<std::vector<std::size_t>> blocks = {
      {64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};
  std::size_t ch = 3, hw = image;
  for (const auto& block : blocks) {
    for (std::size_t out : block) {
      t.last_conv = t.layers.size();
      t.layers.push_back(ConvShell(ch, out, 3, 1));
      t.layers.push_back(Shell(LayerKind::kRelu));
      ch = out;
    }
    LayerSpec pool = Shell(LayerKind::kMaxPool2d);
    pool.kernel = 2;
    pool.stride = 2;
    t.layers.push_back(pool);
    hw = PooledExtent(hw, 2, 2);
  }
  t.layers.push_back(DenseShell(ch * hw * hw, 4096));
  t.layers.push_back(Shell(LayerKind::kRelu));
  t.layers.push_back(DenseShell(4096, 4096));
  t.layers.push_back(Shell(LayerKind::kRelu));
  t.layers.push_back(DenseShell(4096, classes));
  t.layers.push_back(Shell(LayerKind::kSoftmax));
  return t;
}

std::vector<std::uint64_t> LayerFlops(const LayerTable& table, const CostModel& cost) {
  std::vector<std::uint64_t> out;
  out.reserve(table.layers.size());
  Shape in = table.input_shape;
  for (const LayerSpec& l : table.layers) {
    Shape o = LayerOutputShape(l, in);
    std::uint64_t macs = 0;
    if (l.kind == LayerKind::kConv2d)
      macs = static_cast<std::uint64_t>(l.kernel) * l.kernel * l.in_channels * NumElements(o);
    else if (l.kind == LayerKind::kDense)
      macs = static_cast<std::uint64_t>(l.in_features) * l.out_features;
    out.push_back(macs * cost.flops_per_mac);
    in = std::move(o);
  }
  return out;
}

std::uint64_t FlopsInference(const LayerTable& table, const CostModel& cost) {
  std::uint64_t s = 0;
  for (std::uint64_t f : LayerFlops(table, cost)) s += f;
  return s;
}

std::uint64_t FlopsHead(const LayerTable& table, const CostModel& cost) {
  auto per = LayerFlops(table, cost);
  std::uint64_t s = 0;
  for (std::size_t i = table.last_conv + 1; i < per.size(); ++i) s += per[i];
  return s;
}

std::uint64_t FlopsCam(std::size_t channels, std::size_t h, std::size_t w) {
  return static_cast<std::uint64_t>(channels) * h * w;
}

std::uint64_t FlopsCam(const LayerTable& table) {
  if (table.layers.empty()) return 0;
  Shape s = table.input_shape;
  for (std::size_t i = 0; i <= table.last_conv; ++i) s = LayerOutputShape(table.layers[i], s);
  return FlopsCam(s[0], s[1], s[2]);
}

std::uint64_t FlopsFft(std::size_t rows, std::size_t cols, const CostModel& cost) {
  if (rows == 0 || cols == 0) return 0;
  const std::uint64_t n = static_cast<std::uint64_t>(NextPowerOfTwo(rows)) * NextPowerOfTwo(cols);
  return cost.fft_butterfly * n * Log2Ceil(n);
}

std::uint64_t FlopsJaccard(std::size_t pattern_pixels) {
  if (pattern_pixels == 0) return 0;
  const std::uint64_t n = NextPowerOfTwo(pattern_pixels);
  return n * Log2Ceil(n);
}

std::uint64_t FlopsInterpolation(std::size_t patch_pixels) {
  return 9 * static_cast<std::uint64_t>(patch_pixels);
}

std::uint64_t FlopsPcc(std::size_t n) { return static_cast<std::uint64_t>(n) * n; }

Scenario ParseScenario(const std::string& s) {
  if (s == "image") return Scenario::kImage;
  if (s == "audio") return Scenario::kAudio;
  throw InvalidArgument("unknown scenario '" + s + "' (image, audio)");
}

CostBreakdown PipelineCost(const LayerTable& table, Scenario scenario,
                           const PipelineOptions& opt) {
  CostBreakdown b;
  b.inference = FlopsInference(table, opt.cost);
  if (scenario == Scenario::kImage) {
    const std::size_t n_a = opt.crop_size * opt.crop_size;
    b.cam = FlopsCam(table);
    b.fft = FlopsFft(opt.crop_size, opt.crop_size, opt.cost);
    b.jaccard = FlopsJaccard(n_a);
    if (opt.include_recovery) {
      b.interpolation = FlopsInterpolation(opt.region_pixels ? opt.region_pixels : n_a);
      b.reinference = b.inference;
    }
  } else {
    std::size_t n_l = 0;
    if (!table.layers.empty()) {
      Shape s = table.input_shape;
      for (std::size_t i = 0; i <= table.last_conv; ++i) s = LayerOutputShape(table.layers[i], s);
      n_l = NumElements(s);
    }
    b.pcc = FlopsPcc(n_l);
    if (opt.include_recovery) b.reinference = FlopsHead(table, opt.cost);
  }
  b.total = b.Sum();
  return b;
}

std::string FormatBreakdown(const CostBreakdown& b, Scenario scenario) {
  std::ostringstream os;
  auto row = [&](const char* name, std::uint64_t v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-16s %16llu %10.3fM\n", name,
                  static_cast<unsigned long long>(v), v / 1e6);
    os << buf;
  };
  os << "scenario " << (scenario == Scenario::kImage ? "image" : "audio") << "\n";
  row("inference", b.inference);
  if (scenario == Scenario::kImage) {
    row("cam", b.cam);
    row("fft", b.fft);
    row("jaccard", b.jaccard);
    row("interpolation", b.interpolation);
    row("re-inference", b.reinference);
  } else {
    row("pcc", b.pcc);
    row("head", b.reinference);
  }
  row("total", b.total);
  char share[64];
  std::snprintf(share, sizeof(share), "inference share  %.4f\n", b.InferenceShare());
  os << share;
  return os.str();
}

}  // namespace selfcheck
