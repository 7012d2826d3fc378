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

// Per-class reference data built from correctly classified natural samples:
// the expected binarized spectrum of the primary activation source (image)
// and the mean tapped activation magnitude distribution with its top-k
// index set (audio).
//
// Profile file (LNCP, version 1, little-endian):
//
//   "LNCP"           magic
//   version          u16
//   fingerprint      u64, ModelFingerprint of the model the store serves
//   alpha            f64
//   crop size        u32
//   k                u32
//   n_samples        u32
//   record count     u32, then records ordered by (kind, class):
//     class          u32
//     label          u32 length + UTF-8
//     kind           u8 (1 spectrum, 2 activation)
//     sample count   u32
//     spectrum:      u32 rows, u32 cols, ceil(rows*cols/8) bytes of bits,
//                    row-major, least significant bit first
//     activation:    u32 length, f32 values, u32 k, k x u32 indices

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "selfcheck/binary_io.h"
#include "selfcheck/dataset.h"
#include "selfcheck/evidence.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/model.h"
#include "selfcheck/spectrum.h"

namespace selfcheck {

inline constexpr std::uint16_t kProfileFormatVersion = 1;
inline constexpr std::size_t kDefaultTopK = 6;
inline constexpr std::size_t kDefaultProfileSamples = 100;

struct ProfileConfig {
  double alpha = 0.7;
  std::size_t crop_size = kDefaultCropSize;
  std::size_t k = kDefaultTopK;
  std::size_t n_samples = kDefaultProfileSamples;

  friend bool operator==(const ProfileConfig&, const ProfileConfig&) = default;
};

struct SpectrumProfile {
  std::size_t cls = 0;
  std::string label;
  BinarySpectrum expected;
  std::size_t samples = 0;

  friend bool operator==(const SpectrumProfile&, const SpectrumProfile&) = default;
};

struct ActivationProfile {
  std::size_t cls = 0;
  std::string label;
  std::vector<float> expected;  // mean |activation| per last-conv element
  std::vector<std::size_t> top_k;
  std::size_t samples = 0;

  friend bool operator==(const ActivationProfile&, const ActivationProfile&) = default;
};

enum class ProfileKind { kSpectrum, kActivation };

class ProfileStore {
 public:
  ProfileStore() = default;
  ProfileStore(std::uint64_t fingerprint, ProfileConfig config)
      : fingerprint_(fingerprint), config_(config) {}

  std::uint64_t fingerprint() const { return fingerprint_; }
  const ProfileConfig& config() const { return config_; }

  void Put(SpectrumProfile p) { spectra_[p.cls] = std::move(p); }
  void Put(ActivationProfile p) { activations_[p.cls] = std::move(p); }

  // Throw MissingProfile when absent.
  const SpectrumProfile& spectrum(std::size_t cls) const;
  const ActivationProfile& activation(std::size_t cls) const;

  const std::map<std::size_t, SpectrumProfile>& spectra() const { return spectra_; }
  const std::map<std::size_t, ActivationProfile>& activations() const { return activations_; }
  std::size_t size() const { return spectra_.size() + activations_.size(); }

  // Detection is only permitted when the store was built for `model` and
  // holds a profile of `kind` for every class. Throws FingerprintMismatch or
  // MissingProfile.
  void RequireServing(const Model& model, ProfileKind kind) const;

  friend bool operator==(const ProfileStore&, const ProfileStore&) = default;

 private:
  std::uint64_t fingerprint_ = 0;
  ProfileConfig config_;
  std::map<std::size_t, SpectrumProfile> spectra_;
  std::map<std::size_t, ActivationProfile> activations_;
};

// Raised when a class has fewer correctly classified samples than requested.
class InsufficientSamples : public Error {
 public:
  InsufficientSamples(const std::string& what, std::size_t achieved)
      : Error(what), achieved_(achieved) {}
  std::size_t achieved() const { return achieved_; }

 private:
  std::size_t achieved_;
};

// Majority vote over the region spectra of the first n_samples correctly
// classified images of `cls`, in dataset order. Samples whose heatmap has no
// primary source are skipped.
SpectrumProfile BuildImageProfile(const Model& model, const LabeledSet& dataset, std::size_t cls,
                                  const ProfileConfig& cfg);

// Element-wise mean of |tapped activations| (Model::activation_layer) over the first n_samples
// correctly classified clips of `cls`; top-k per cfg.k.
ActivationProfile BuildAudioProfile(const Model& model, const LabeledSet& waveforms,
                                    std::size_t cls, const ProfileConfig& cfg,
                                    const MfccConfig& mfcc);

// Same, from inputs already in the model's input shape.
ActivationProfile BuildActivationProfile(const Model& model, const LabeledSet& inputs,
                                         std::size_t cls, const ProfileConfig& cfg);

// Profiles for every class of the model.
ProfileStore BuildImageStore(const Model& model, const LabeledSet& dataset,
                             const ProfileConfig& cfg);
ProfileStore BuildAudioStore(const Model& model, const LabeledSet& waveforms,
                             const ProfileConfig& cfg, const MfccConfig& mfcc);

Bytes SaveProfiles(const ProfileStore& store);
// Rejects files whose fingerprint differs from `expected_fingerprint`.
ProfileStore LoadProfiles(std::span<const std::uint8_t> bytes, std::uint64_t expected_fingerprint);

void SaveProfilesFile(const ProfileStore& store, const std::string& path);
ProfileStore LoadProfilesFile(const std::string& path, std::uint64_t expected_fingerprint);

}  // namespace selfcheck
