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

#include <cstddef>
#include <vector>

#include "selfcheck/tensor.h"

namespace selfcheck {

struct MfccConfig {
  double sample_rate = 16000.0;
  std::size_t frame_len = 400;
  std::size_t hop = 160;
  std::size_t mel_bands = 40;
  std::size_t coefficients = 13;
  std::size_t fft_size = 512;

  // Throws InvalidArgument when the configuration is inconsistent.
  void Validate() const;
};

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

std::size_t NumFrames(std::size_t samples, const MfccConfig& cfg);

// Triangular filters with edges evenly spaced on the mel scale between 0 Hz
// and Nyquist. Row m holds weights over FFT bins 0..fft_size/2.
class MelFilterbank {
 public:
  explicit MelFilterbank(const MfccConfig& cfg);

  std::size_t bands() const { return centers_hz_.size(); }
  std::size_t bins() const { return bins_; }
  double weight(std::size_t band, std::size_t bin) const { return w_[band * bins_ + bin]; }
  const std::vector<double>& centers_hz() const { return centers_hz_; }

 private:
  std::size_t bins_;
  std::vector<double> w_;
  std::vector<double> centers_hz_;
};

// Per-frame mel filterbank energies (before the log), [frames x mel_bands].
Tensor MelEnergies(const Tensor& waveform, const MfccConfig& cfg);

// Hann window -> FFT -> power spectrum -> mel filterbank -> log(x + 1e-10)
// -> orthonormal DCT-II, first `coefficients` kept. Output [frames x coefficients].
Tensor Mfcc(const Tensor& waveform, const MfccConfig& cfg);

// Vector-Jacobian product of Mfcc: given dL/dfeatures, returns dL/dwaveform.
Tensor MfccBackward(const Tensor& waveform, const MfccConfig& cfg, const Tensor& grad_features);

}  // namespace selfcheck
