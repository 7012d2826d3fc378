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

#pragma once

// Post-prediction self-verification and recovery. The image path compares the
// binarized spectrum of the primary activation source with the predicted
// class's expected spectrum; the audio path compares last-conv activation
// magnitudes with the class's mean distribution. Inputs found inconsistent
// are repaired (inpainting / activation suppression) and re-classified.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "selfcheck/engine.h"
#include "selfcheck/image_ops.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/model.h"
#include "selfcheck/profiles.h"
#include "selfcheck/tensor.h"

namespace selfcheck {

inline constexpr double kDefaultImageThreshold = 0.46;
inline constexpr double kDefaultAudioThreshold = 0.11;

enum class Modality { kImage, kAudio, kCombined };
enum class Verdict { kNatural, kAdversarial, kIndeterminate };

const char* ModalityName(Modality m);
const char* VerdictName(Verdict v);
Modality ParseModality(const std::string& s);

struct DetectionReport {
  Modality modality = Modality::kImage;
  std::size_t predicted = 0;
  double inconsistency = 0.0;        // NaN when indeterminate
  double threshold = 0.0;
  // Combined mode only.
  double audio_inconsistency = 0.0;
  double audio_threshold = 0.0;
  Verdict verdict = Verdict::kNatural;
  std::optional<Region> region;
  std::vector<std::size_t> flagged;  // audio: top-k indices of the predicted class
  std::string reason;                // set when indeterminate
  double elapsed_ms = 0.0;
  int full_passes = 0;
};

struct RecoveryOutcome {
  Tensor recovered;                // image path
  std::vector<float> activations;  // audio path: denoised last-conv values
  std::size_t old_class = 0;
  std::size_t new_class = 0;
  double old_top1 = 0.0;
  double new_top1 = 0.0;
};

// verdict: adversarial iff d > threshold.
Verdict Judge(double d, double threshold);

// One forward pass. `forward` receives the pass (with the last-conv tap) for
// later recovery. Missing profiles and fingerprint mismatches throw; a
// heatmap without a primary source yields an indeterminate report.
DetectionReport DetectImage(const Model& model, const Tensor& image, const ProfileStore& store,
                            double threshold = kDefaultImageThreshold,
                            double alpha = 0.7, PassCounter* counter = nullptr,
                            ForwardResult* forward = nullptr);

// `features` already match the model input. Zero-variance activations yield
// an indeterminate report.
DetectionReport DetectActivation(const Model& model, const Tensor& features,
                                 const ProfileStore& store,
                                 double threshold = kDefaultAudioThreshold,
                                 PassCounter* counter = nullptr,
                                 ForwardResult* forward = nullptr);

DetectionReport DetectAudio(const Model& model, const Tensor& waveform, const ProfileStore& store,
                            double threshold = kDefaultAudioThreshold,
                            const MfccConfig& mfcc = {}, PassCounter* counter = nullptr,
                            ForwardResult* forward = nullptr);

// Replaces every pixel inside `region` by the mean of its in-bounds 8-neighbors
// read from the unmodified image, per channel. Throws RecoveryImpossible
// when the region spans the whole image.
Tensor InpaintRegion(const Tensor& image, const Region& region);

// Inpaints and re-classifies (one forward pass). `original` is the detection
// pass; its probabilities supply old_top1.
RecoveryOutcome RecoverImage(const Model& model, const Tensor& image, const Region& region,
                             const ForwardResult& original, PassCounter* counter = nullptr);

// Zeroes the k largest entries of wrong_class's expected distribution in the
// tapped last-conv activations and re-runs only the layers after it.
RecoveryOutcome RecoverAudio(const Model& model, const ForwardResult& detection,
                             const ProfileStore& store, std::size_t wrong_class, std::size_t k,
                             PassCounter* counter = nullptr);

struct DefenseConfig {
  Modality modality = Modality::kImage;
  double image_threshold = kDefaultImageThreshold;
  double audio_threshold = kDefaultAudioThreshold;
  double alpha = 0.7;
  std::size_t k = kDefaultTopK;
  MfccConfig mfcc;
};

struct DefenseResult {
  std::size_t final_label = 0;
  DetectionReport report;
  std::optional<RecoveryOutcome> recovery;
  PassCounter passes;
};

// Detect, and on an adversarial verdict recover. Image: input is [C,H,W];
// audio: input is a waveform; combined: image input checked with both metrics
// from the same pass, recovered by inpainting.
DefenseResult Defend(const Model& model, const Tensor& input, const ProfileStore& store,
                     const DefenseConfig& cfg);

// Line-delimited key=value records, fields in declaration order.
std::string FormatReport(const DetectionReport& r, const Model& model, bool with_time = true);
std::string FormatRecovery(const RecoveryOutcome& r, const Model& model);

}  // namespace selfcheck
