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

#include "selfcheck/mfcc.h"

#include <cmath>
#include <numbers>

#include "selfcheck/error.h"
#include "selfcheck/fft.h"

namespace selfcheck {
namespace {

constexpr double kLogFloor = 1e-10;

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  return w;
}

// Orthonormal DCT-II basis, rows = coefficients.
std::vector<double> DctMatrix(std::size_t coeffs, std::size_t bands) {
  std::vector<double> d(coeffs * bands);
  const double n = static_cast<double>(bands);
  for (std::size_t k = 0; k < coeffs; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t m = 0; m < bands; ++m)
      d[k * bands + m] = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                          (static_cast<double>(m) + 0.5) / n);
  }
  return d;
}

void CheckWaveform(const Tensor& waveform, const MfccConfig& cfg) {
  cfg.Validate();
  if (waveform.rank() != 1) throw ShapeError("mfcc: waveform must be 1-D");
  if (waveform.size() < cfg.frame_len)
    throw InvalidArgument("mfcc: waveform of " + std::to_string(waveform.size()) +
                          " samples is shorter than one frame (" +
                          std::to_string(cfg.frame_len) + ")");
}

// Complex spectrum of frame t (windowed, zero-padded).
std::vector<Complex> FrameSpectrum(const Tensor& x, const MfccConfig& cfg,
                                   const std::vector<double>& window, std::size_t t) {
  std::vector<Complex> buf(cfg.fft_size, Complex(0.0, 0.0));
  const std::size_t start = t * cfg.hop;
  for (std::size_t n = 0; n < cfg.frame_len; ++n) buf[n] = window[n] * x[start + n];
  Fft(buf);
  return buf;
}

std::vector<double> BandEnergies(const std::vector<Complex>& spec, const MelFilterbank& fb) {
  std::vector<double> e(fb.bands(), 0.0);
  for (std::size_t m = 0; m < fb.bands(); ++m)
    for (std::size_t k = 0; k < fb.bins(); ++k) {
      const double w = fb.weight(m, k);
      if (w != 0.0) e[m] += w * std::norm(spec[k]);
    }
  return e;
}

}  // namespace

void MfccConfig::Validate() const {
  if (sample_rate <= 0) throw InvalidArgument("mfcc: sample_rate must be positive");
  if (frame_len == 0 || hop == 0) throw InvalidArgument("mfcc: frame_len and hop must be >= 1");
  if (!IsPowerOfTwo(fft_size)) throw InvalidArgument("mfcc: fft_size must be a power of two");
  if (frame_len > fft_size) throw InvalidArgument("mfcc: frame_len exceeds fft_size");
  if (coefficients == 0 || coefficients > mel_bands)
    throw InvalidArgument("mfcc: need 0 < coefficients <= mel_bands");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t NumFrames(std::size_t samples, const MfccConfig& cfg) {
  if (samples < cfg.frame_len) return 0;
  return 1 + (samples - cfg.frame_len) / cfg.hop;
}

MelFilterbank::MelFilterbank(const MfccConfig& cfg) : bins_(cfg.fft_size / 2 + 1) {
  cfg.Validate();
  const std::size_t M = cfg.mel_bands;
  const double nyquist = cfg.sample_rate / 2.0;
  const double mel_hi = HzToMel(nyquist);
  std::vector<double> edges(M + 2);
  for (std::size_t i = 0; i < M + 2; ++i)
    edges[i] = MelToHz(mel_hi * static_cast<double>(i) / static_cast<double>(M + 1));
  w_.assign(M * bins_, 0.0);
  centers_hz_.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double lo = edges[m], c = edges[m + 1], hi = edges[m + 2];
    centers_hz_[m] = c;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(cfg.fft_size);
      double w = 0.0;
      if (f > lo && f <= c) w = (f - lo) / (c - lo);
      else if (f > c && f < hi) w = (hi - f) / (hi - c);
      w_[m * bins_ + k] = w;
    }
  }
}

Tensor MelEnergies(const Tensor& waveform, const MfccConfig& cfg) {
  CheckWaveform(waveform, cfg);
  const MelFilterbank fb(cfg);
  const auto window = HannWindow(cfg.frame_len);
  const std::size_t T = NumFrames(waveform.size(), cfg);
  Tensor out({T, cfg.mel_bands});
  for (std::size_t t = 0; t < T; ++t) {
    auto e = BandEnergies(FrameSpectrum(waveform, cfg, window, t), fb);
    for (std::size_t m = 0; m < e.size(); ++m) out.at(t, m) = static_cast<float>(e[m]);
  }
  return out;
}

Tensor Mfcc(const Tensor& waveform, const MfccConfig& cfg) {
  CheckWaveform(waveform, cfg);
  const MelFilterbank fb(cfg);
  const auto window = HannWindow(cfg.frame_len);
  const auto dct = DctMatrix(cfg.coefficients, cfg.mel_bands);
  const std::size_t T = NumFrames(waveform.size(), cfg);
  Tensor out({T, cfg.coefficients});
  for (std::size_t t = 0; t < T; ++t) {
    auto e = BandEnergies(FrameSpectrum(waveform, cfg, window, t), fb);
    for (auto& v : e) v = std::log(v + kLogFloor);
    for (std::size_t k = 0; k < cfg.coefficients; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < cfg.mel_bands; ++m) s += dct[k * cfg.mel_bands + m] * e[m];
      out.at(t, k) = static_cast<float>(s);
    }
  }
  return out;
}

Tensor MfccBackward(const Tensor& waveform, const MfccConfig& cfg, const Tensor& grad) {
  CheckWaveform(waveform, cfg);
  const std::size_t T = NumFrames(waveform.size(), cfg);
  if (grad.shape() != Shape{T, cfg.coefficients})
    throw ShapeError("mfcc backward: gradient shape " + ShapeString(grad.shape()) +
                     " does not match features");
  const MelFilterbank fb(cfg);
  const auto window = HannWindow(cfg.frame_len);
  const auto dct = DctMatrix(cfg.coefficients, cfg.mel_bands);
  std::vector<double> gx(waveform.size(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto spec = FrameSpectrum(waveform, cfg, window, t);
    const auto e = BandEnergies(spec, fb);
    // dL/dE_m = sum_k g_k D_km / (E_m + floor)
    std::vector<double> ge(cfg.mel_bands, 0.0);
    for (std::size_t m = 0; m < cfg.mel_bands; ++m) {
      double s = 0.0;
      for (std::size_t k = 0; k < cfg.coefficients; ++k)
        s += grad.at(t, k) * dct[k * cfg.mel_bands + m];
      ge[m] = s / (e[m] + kLogFloor);
    }
    // dL/dP_j = sum_m dL/dE_m W_mj; P_j = |X_j|^2, so
    // dL/dx_n = 2 w_n Re(sum_j dL/dP_j conj(X_j) e^{-2 pi i j n / N})
    std::vector<Complex> y(cfg.fft_size, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < fb.bins(); ++j) {
      double gp = 0.0;
      for (std::size_t m = 0; m < cfg.mel_bands; ++m) gp += ge[m] * fb.weight(m, j);
      y[j] = gp * std::conj(spec[j]);
    }
    Fft(y);
    const std::size_t start = t * cfg.hop;
    for (std::size_t n = 0; n < cfg.frame_len; ++n)
      gx[start + n] += 2.0 * window[n] * y[n].real();
  }
  Tensor out(waveform.shape());
  for (std::size_t i = 0; i < gx.size(); ++i) out[i] = static_cast<float>(gx[i]);
  return out;
}

}  // namespace selfcheck
