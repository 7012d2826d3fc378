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

#include "selfcheck/profiles.h"

#include <bit>

#include "selfcheck/engine.h"
#include "selfcheck/error.h"
#include "selfcheck/model_io.h"

namespace selfcheck {

const SpectrumProfile& ProfileStore::spectrum(std::size_t cls) const {
  auto it = spectra_.find(cls);
  if (it == spectra_.end())
    throw MissingProfile("no spectrum profile for class " + std::to_string(cls));
  return it->second;
}

const ActivationProfile& ProfileStore::activation(std::size_t cls) const {
  auto it = activations_.find(cls);
  if (it == activations_.end())
    throw MissingProfile("no activation profile for class " + std::to_string(cls));
  return it->second;
}

void ProfileStore::RequireServing(const Model& model, ProfileKind kind) const {
  if (fingerprint_ != ModelFingerprint(model))
    throw FingerprintMismatch("profile store was built for a different model");
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    if (kind == ProfileKind::kSpectrum) spectrum(c);
    else activation(c);
  }
}

namespace {

void CheckClass(const Model& model, std::size_t cls, const ProfileConfig& cfg) {
  if (cls >= model.num_classes())
    throw InvalidArgument("class " + std::to_string(cls) + " out of range");
  if (cfg.n_samples == 0) throw InvalidArgument("n_samples must be >= 1");
}

[[noreturn]] void Insufficient(std::size_t cls, std::size_t got, std::size_t want) {
  throw InsufficientSamples("class " + std::to_string(cls) + ": only " + std::to_string(got) +
                                " correctly classified samples, need " + std::to_string(want),
                            got);
}

}  // namespace

SpectrumProfile BuildImageProfile(const Model& model, const LabeledSet& dataset, std::size_t cls,
                                  const ProfileConfig& cfg) {
  CheckClass(model, cls, cfg);
  std::vector<BinarySpectrum> masks;
  for (std::size_t i = 0; i < dataset.size() && masks.size() < cfg.n_samples; ++i) {
    if (dataset.labels[i] != cls) continue;
    try {
      ImageEvidence ev = ExtractImageEvidence(model, dataset.inputs[i], cfg.alpha, cfg.crop_size);
      if (ev.forward.predicted != cls) continue;
      masks.push_back(std::move(ev.pattern));
    } catch (const NoPrimarySource&) {
      continue;
    }
  }
  if (masks.size() < cfg.n_samples) Insufficient(cls, masks.size(), cfg.n_samples);
  return SpectrumProfile{cls, model.labels()[cls], MajorityVote(masks), masks.size()};
}

ActivationProfile BuildActivationProfile(const Model& model, const LabeledSet& inputs,
                                         std::size_t cls, const ProfileConfig& cfg) {
  CheckClass(model, cls, cfg);
  const std::size_t n = NumElements(model.activation_shape());
  if (cfg.k == 0 || cfg.k > n)
    throw InvalidArgument("top-k: k must be in [1, " + std::to_string(n) + "]");
  std::vector<double> sum(n, 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < inputs.size() && used < cfg.n_samples; ++i) {
    if (inputs.labels[i] != cls) continue;
    ForwardResult r = Forward(model, inputs.inputs[i], {model.activation_layer()});
    if (r.predicted != cls) continue;
    auto f = ActivationDistribution(r.taps.at(model.activation_layer()));
    for (std::size_t j = 0; j < n; ++j) sum[j] += f[j];
    ++used;
  }
  if (used < cfg.n_samples) Insufficient(cls, used, cfg.n_samples);
  ActivationProfile p;
  p.cls = cls;
  p.label = model.labels()[cls];
  p.expected.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    p.expected[j] = static_cast<float>(sum[j] / static_cast<double>(used));
  p.top_k = TopK(p.expected, cfg.k);
  p.samples = used;
  return p;
}

ActivationProfile BuildAudioProfile(const Model& model, const LabeledSet& waveforms,
                                    std::size_t cls, const ProfileConfig& cfg,
                                    const MfccConfig& mfcc) {
  LabeledSet feats;
  for (std::size_t i = 0; i < waveforms.size(); ++i)
    if (waveforms.labels[i] == cls)
      feats.Add(AudioFeatures(model, waveforms.inputs[i], mfcc), cls);
  return BuildActivationProfile(model, feats, cls, cfg);
}

ProfileStore BuildImageStore(const Model& model, const LabeledSet& dataset,
                             const ProfileConfig& cfg) {
  ProfileStore store(ModelFingerprint(model), cfg);
  for (std::size_t c = 0; c < model.num_classes(); ++c)
    store.Put(BuildImageProfile(model, dataset, c, cfg));
  return store;
}

ProfileStore BuildAudioStore(const Model& model, const LabeledSet& waveforms,
                             const ProfileConfig& cfg, const MfccConfig& mfcc) {
  ProfileStore store(ModelFingerprint(model), cfg);
  for (std::size_t c = 0; c < model.num_classes(); ++c)
    store.Put(BuildAudioProfile(model, waveforms, c, cfg, mfcc));
  return store;
}

Bytes SaveProfiles(const ProfileStore& store) {
  ByteWriter w;
  w.Raw("LNCP", 4);
  w.U16(kProfileFormatVersion);
  w.U64(store.fingerprint());
  w.U64(std::bit_cast<std::uint64_t>(store.config().alpha));
  w.U32(static_cast<std::uint32_t>(store.config().crop_size));
  w.U32(static_cast<std::uint32_t>(store.config().k));
  w.U32(static_cast<std::uint32_t>(store.config().n_samples));
  w.U32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [cls, p] : store.spectra()) {
    w.U32(static_cast<std::uint32_t>(cls));
    w.Str(p.label);
    w.U8(1);
    w.U32(static_cast<std::uint32_t>(p.samples));
    w.U32(static_cast<std::uint32_t>(p.expected.rows()));
    w.U32(static_cast<std::uint32_t>(p.expected.cols()));
    std::vector<std::uint8_t> packed((p.expected.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < p.expected.size(); ++i)
      if (p.expected.bit(i)) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    w.Raw(packed.data(), packed.size());
  }
  for (const auto& [cls, p] : store.activations()) {
    w.U32(static_cast<std::uint32_t>(cls));
    w.Str(p.label);
    w.U8(2);
    w.U32(static_cast<std::uint32_t>(p.samples));
    w.U32(static_cast<std::uint32_t>(p.expected.size()));
    w.F32s(p.expected);
    w.U32(static_cast<std::uint32_t>(p.top_k.size()));
    for (std::size_t i : p.top_k) w.U32(static_cast<std::uint32_t>(i));
  }
  return w.Take();
}

ProfileStore LoadProfiles(std::span<const std::uint8_t> bytes, std::uint64_t expected) {
  ByteReader r(bytes, "profiles");
  r.Magic("LNCP");
  const std::uint16_t version = r.U16();
  if (version != kProfileFormatVersion)
    throw FormatError("profiles: unsupported version " + std::to_string(version));
  const std::uint64_t fp = r.U64();
  if (fp != expected)
    throw FingerprintMismatch("profiles: store was built for a different model");
  ProfileConfig cfg;
  cfg.alpha = std::bit_cast<double>(r.U64());
  cfg.crop_size = r.U32();
  cfg.k = r.U32();
  cfg.n_samples = r.U32();
  ProfileStore store(fp, cfg);
  const std::uint32_t n = r.U32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t cls = r.U32();
    std::string label = r.Str();
    const std::uint8_t kind = r.U8();
    const std::size_t samples = r.U32();
    if (kind == 1) {
      const std::size_t rows = r.U32(), cols = r.U32();
      if (!IsPowerOfTwo(rows) || !IsPowerOfTwo(cols) || rows > 4096 || cols > 4096)
        throw FormatError("profiles: bad spectrum dims");
      BinarySpectrum mask(rows, cols);
      auto packed = r.Take((rows * cols + 7) / 8);
      for (std::size_t b = 0; b < rows * cols; ++b)
        mask.set_bit(b, (packed[b / 8] >> (b % 8)) & 1u);
      store.Put(SpectrumProfile{cls, std::move(label), std::move(mask), samples});
    } else if (kind == 2) {
      ActivationProfile p;
      p.cls = cls;
      p.label = std::move(label);
      p.samples = samples;
      p.expected = r.F32s(r.U32());
      const std::uint32_t k = r.U32();
      if (k > p.expected.size()) throw FormatError("profiles: top-k longer than distribution");
      for (std::uint32_t j = 0; j < k; ++j) {
        const std::size_t idx = r.U32();
        if (idx >= p.expected.size()) throw FormatError("profiles: top-k index out of range");
        p.top_k.push_back(idx);
      }
      store.Put(std::move(p));
    } else {
      throw FormatError("profiles: unknown record kind " + std::to_string(kind));
    }
  }
  r.ExpectEnd();
  return store;
}

void SaveProfilesFile(const ProfileStore& store, const std::string& path) {
  WriteFileBytes(path, SaveProfiles(store));
}

ProfileStore LoadProfilesFile(const std::string& path, std::uint64_t expected_fingerprint) {
  return LoadProfiles(ReadFileBytes(path), expected_fingerprint);
}

}  // namespace selfcheck
