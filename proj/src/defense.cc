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

#include "selfcheck/defense.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "selfcheck/error.h"
#include "selfcheck/evidence.h"
#include "selfcheck/interpret.h"
#include "selfcheck/metrics.h"

namespace selfcheck {

namespace {

using Clock = std::chrono::steady_clock;

double Ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void Indeterminate(DetectionReport& r, const std::string& why) {
  r.verdict = Verdict::kIndeterminate;
  r.inconsistency = kNaN;
  r.reason = why;
}

// Pearson inconsistency of the pass's last-conv magnitudes against the
// predicted class profile; fills flagged on success.
void ActivationCheck(const Model& model, const ForwardResult& fwd, const ProfileStore& store,
                     DetectionReport& r, double& d) {
  const ActivationProfile& prof = store.activation(fwd.predicted);
  std::vector<float> f = ActivationDistribution(fwd.taps.at(model.activation_layer()));
  if (f.size() != prof.expected.size())
    throw ShapeError("activation profile length " + std::to_string(prof.expected.size()) +
                     " does not match last-conv size " + std::to_string(f.size()));
  d = PearsonInconsistency(f, prof.expected);
  r.flagged = prof.top_k;
}

}  // namespace

const char* ModalityName(Modality m) {
  switch (m) {
    case Modality::kImage: return "image";
    case Modality::kAudio: return "audio";
    case Modality::kCombined: return "combined";
  }
  return "?";
}

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kNatural: return "natural";
    case Verdict::kAdversarial: return "adversarial";
    case Verdict::kIndeterminate: return "indeterminate";
  }
  return "?";
}

Modality ParseModality(const std::string& s) {
  if (s == "image") return Modality::kImage;
  if (s == "audio") return Modality::kAudio;
  if (s == "combined") return Modality::kCombined;
  throw InvalidArgument("unknown modality '" + s + "' (image, audio, combined)");
}

Verdict Judge(double d, double threshold) {
  return d > threshold ? Verdict::kAdversarial : Verdict::kNatural;
}

DetectionReport DetectImage(const Model& model, const Tensor& image, const ProfileStore& store,
                            double threshold, double alpha, PassCounter* counter,
                            ForwardResult* forward) {
  const auto start = Clock::now();
  PassCounter local;
  DetectionReport r;
  r.modality = Modality::kImage;
  r.threshold = threshold;
  ForwardResult fwd = Forward(model, image, {model.activation_layer()}, &local);
  r.predicted = fwd.predicted;
  const SpectrumProfile& prof = store.spectrum(fwd.predicted);
  try {
    Tensor heat = Cam(fwd.taps.at(model.activation_layer()));
    Region region = LocalizePrimaryRegion(heat, image.shape(), alpha);
    BinarySpectrum pattern = RegionSpectrum(image, region, store.config().crop_size);
    r.region = region;
    r.inconsistency = JaccardInconsistency(pattern, prof.expected);
    r.verdict = Judge(r.inconsistency, threshold);
  } catch (const NoPrimarySource& e) {
    Indeterminate(r, e.what());
  }
  r.full_passes = local.full;
  if (counter) {
    counter->full += local.full;
    counter->head += local.head;
  }
  if (forward) *forward = std::move(fwd);
  r.elapsed_ms = Ms(start);
  return r;
}

DetectionReport DetectActivation(const Model& model, const Tensor& features,
                                 const ProfileStore& store, double threshold,
                                 PassCounter* counter, ForwardResult* forward) {
  const auto start = Clock::now();
  PassCounter local;
  DetectionReport r;
  r.modality = Modality::kAudio;
  r.threshold = threshold;
  ForwardResult fwd = Forward(model, features, {model.activation_layer()}, &local);
  r.predicted = fwd.predicted;
  try {
    ActivationCheck(model, fwd, store, r, r.inconsistency);
    r.verdict = Judge(r.inconsistency, threshold);
  } catch (const DegenerateInput& e) {
    r.flagged.clear();
    Indeterminate(r, e.what());
  }
  r.full_passes = local.full;
  if (counter) {
    counter->full += local.full;
    counter->head += local.head;
  }
  if (forward) *forward = std::move(fwd);
  r.elapsed_ms = Ms(start);
  return r;
}

DetectionReport DetectAudio(const Model& model, const Tensor& waveform, const ProfileStore& store,
                            double threshold, const MfccConfig& mfcc, PassCounter* counter,
                            ForwardResult* forward) {
  const auto start = Clock::now();
  DetectionReport r = DetectActivation(model, AudioFeatures(model, waveform, mfcc), store,
                                       threshold, counter, forward);
  r.elapsed_ms = Ms(start);
  return r;
}

Tensor InpaintRegion(const Tensor& image, const Region& region) {
  if (image.rank() != 3) throw ShapeError("inpaint expects [C,H,W], got " + ShapeString(image.shape()));
  const std::size_t C = image.dim(0), H = image.dim(1), W = image.dim(2);
  if (region.top + region.height > H || region.left + region.width > W)
    throw InvalidArgument("inpaint region outside the image");
  if (region.height == H && region.width == W)
    throw RecoveryImpossible("region covers the whole image; no exterior neighbors");
  Tensor out = image;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t y = region.top; y < region.top + region.height; ++y) {
      for (std::size_t x = region.left; x < region.left + region.width; ++x) {
        double sum = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            const long yy = static_cast<long>(y) + dy, xx = static_cast<long>(x) + dx;
            if (yy < 0 || xx < 0 || yy >= static_cast<long>(H) || xx >= static_cast<long>(W))
              continue;
            sum += image.at(c, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
            ++n;
          }
        }
        const double v = n > 0 ? sum / n : image.at(c, y, x);
        out.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

RecoveryOutcome RecoverImage(const Model& model, const Tensor& image, const Region& region,
                             const ForwardResult& original, PassCounter* counter) {
  RecoveryOutcome out;
  out.recovered = InpaintRegion(image, region);
  out.old_class = original.predicted;
  out.old_top1 = original.probabilities[original.predicted];
  ForwardResult again = Forward(model, out.recovered, {}, counter);
  out.new_class = again.predicted;
  out.new_top1 = again.probabilities[again.predicted];
  return out;
}

RecoveryOutcome RecoverAudio(const Model& model, const ForwardResult& detection,
                             const ProfileStore& store, std::size_t wrong_class, std::size_t k,
                             PassCounter* counter) {
  auto tap = detection.taps.find(model.activation_layer());
  if (tap == detection.taps.end())
    throw InvalidArgument("recover_audio: detection pass lacks the last-conv tap");
  const ActivationProfile& prof = store.activation(wrong_class);
  if (prof.expected.size() != tap->second.size())
    throw ShapeError("activation profile does not match last-conv size");
  Tensor act = tap->second;
  for (std::size_t i : TopK(prof.expected, k)) act[i] = 0.0f;
  RecoveryOutcome out;
  out.old_class = detection.predicted;
  out.old_top1 = detection.probabilities[detection.predicted];
  ForwardResult head = ForwardHead(model, act, counter);
  out.new_class = head.predicted;
  out.new_top1 = head.probabilities[head.predicted];
  out.activations = act.vector();
  return out;
}

DefenseResult Defend(const Model& model, const Tensor& input, const ProfileStore& store,
                     const DefenseConfig& cfg) {
  DefenseResult res;
  ForwardResult fwd;
  switch (cfg.modality) {
    case Modality::kImage:
      res.report = DetectImage(model, input, store, cfg.image_threshold, cfg.alpha, &res.passes,
                               &fwd);
      break;
    case Modality::kAudio:
      res.report = DetectAudio(model, input, store, cfg.audio_threshold, cfg.mfcc, &res.passes,
                               &fwd);
      break;
    case Modality::kCombined: {
      const auto start = Clock::now();
      res.report = DetectImage(model, input, store, cfg.image_threshold, cfg.alpha, &res.passes,
                               &fwd);
      DetectionReport& r = res.report;
      r.modality = Modality::kCombined;
      r.audio_threshold = cfg.audio_threshold;
      try {
        ActivationCheck(model, fwd, store, r, r.audio_inconsistency);
        if (r.verdict != Verdict::kIndeterminate &&
            Judge(r.audio_inconsistency, cfg.audio_threshold) == Verdict::kAdversarial)
          r.verdict = Verdict::kAdversarial;
      } catch (const DegenerateInput& e) {
        r.audio_inconsistency = kNaN;
        r.flagged.clear();
        if (r.verdict == Verdict::kNatural) Indeterminate(r, e.what());
      }
      r.elapsed_ms = Ms(start);
      break;
    }
  }
  res.final_label = res.report.predicted;
  if (res.report.verdict != Verdict::kAdversarial) return res;

  const auto start = Clock::now();
  if (cfg.modality == Modality::kAudio) {
    res.recovery = RecoverAudio(model, fwd, store, res.report.predicted, cfg.k, &res.passes);
  } else {
    if (!res.report.region) return res;
    res.recovery = RecoverImage(model, input, *res.report.region, fwd, &res.passes);
  }
  res.final_label = res.recovery->new_class;
  res.report.elapsed_ms += Ms(start);
  return res;
}

std::string FormatReport(const DetectionReport& r, const Model& model, bool with_time) {
  std::ostringstream os;
  os.precision(6);
  os << "modality=" << ModalityName(r.modality) << " predicted=" << r.predicted
     << " label=" << model.labels()[r.predicted] << " inconsistency=" << r.inconsistency
     << " threshold=" << r.threshold;
  if (r.modality == Modality::kCombined)
    os << " audio_inconsistency=" << r.audio_inconsistency
       << " audio_threshold=" << r.audio_threshold;
  os << " verdict=" << VerdictName(r.verdict);
  if (r.region)
    os << " region=" << r.region->top << "," << r.region->left << "," << r.region->height << ","
       << r.region->width;
  if (!r.flagged.empty()) {
    os << " flagged=";
    for (std::size_t i = 0; i < r.flagged.size(); ++i) os << (i ? "," : "") << r.flagged[i];
  }
  if (!r.reason.empty()) os << " reason=\"" << r.reason << "\"";
  os << " full_passes=" << r.full_passes;
  if (with_time) os << " elapsed_ms=" << r.elapsed_ms;
  return os.str();
}

std::string FormatRecovery(const RecoveryOutcome& r, const Model& model) {
  std::ostringstream os;
  os.precision(6);
  os << "recovery old=" << r.old_class << " old_label=" << model.labels()[r.old_class]
     << " old_top1=" << r.old_top1 << " new=" << r.new_class
     << " new_label=" << model.labels()[r.new_class] << " new_top1=" << r.new_top1;
  return os.str();
}

}  // namespace selfcheck
