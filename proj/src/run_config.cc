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

#include "selfcheck/run_config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "selfcheck/error.h"

namespace selfcheck {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseUnsigned(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw InvalidArgument(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double ParseDouble(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out))
    throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  return out;
}

}  // namespace

void RunConfig::Validate() const {
  if (!(image_threshold >= 0.0) || !(audio_threshold >= 0.0))
    throw InvalidArgument("thresholds must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (crop_size == 0 || n_samples == 0) throw InvalidArgument("crop_size and n_samples must be >= 1");
  if (workers == 0) throw InvalidArgument("workers must be >= 1");
  mfcc.Validate();
}

DefenseConfig RunConfig::Defense() const {
  DefenseConfig d;
  d.modality = modality;
  d.image_threshold = image_threshold;
  d.audio_threshold = audio_threshold;
  d.alpha = alpha;
  d.k = k;
  d.mfcc = mfcc;
  return d;
}

ProfileConfig RunConfig::Profile() const {
  ProfileConfig p;
  p.alpha = alpha;
  p.crop_size = crop_size;
  p.k = k;
  p.n_samples = n_samples;
  return p;
}

const std::vector<std::string>& RunConfigKeys() {
  static const std::vector<std::string> keys = {
      "modality",    "model",          "profiles",       "image_threshold", "audio_threshold",
      "alpha",       "k",              "crop_size",      "n_samples",       "seed",
      "workers",     "output",         "mfcc.sample_rate", "mfcc.frame_len", "mfcc.hop",
      "mfcc.mel_bands", "mfcc.coefficients", "mfcc.fft_size"};
  return keys;
}

void SetRunConfigValue(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = Trim(raw);
  if (key == "modality") cfg.modality = ParseModality(v);
  else if (key == "model") cfg.model = v;
  else if (key == "profiles") cfg.profiles = v;
  else if (key == "image_threshold") cfg.image_threshold = ParseDouble(key, v);
  else if (key == "audio_threshold") cfg.audio_threshold = ParseDouble(key, v);
  else if (key == "alpha") cfg.alpha = ParseDouble(key, v);
  else if (key == "k") cfg.k = ParseUnsigned<std::size_t>(key, v);
  else if (key == "crop_size") cfg.crop_size = ParseUnsigned<std::size_t>(key, v);
  else if (key == "n_samples") cfg.n_samples = ParseUnsigned<std::size_t>(key, v);
  else if (key == "seed") cfg.seed = ParseUnsigned<std::uint64_t>(key, v);
  else if (key == "workers") cfg.workers = ParseUnsigned<std::size_t>(key, v);
  else if (key == "output") cfg.output = v;
  else if (key == "mfcc.sample_rate") cfg.mfcc.sample_rate = ParseDouble(key, v);
  else if (key == "mfcc.frame_len") cfg.mfcc.frame_len = ParseUnsigned<std::size_t>(key, v);
  else if (key == "mfcc.hop") cfg.mfcc.hop = ParseUnsigned<std::size_t>(key, v);
  else if (key == "mfcc.mel_bands") cfg.mfcc.mel_bands = ParseUnsigned<std::size_t>(key, v);
  else if (key == "mfcc.coefficients") cfg.mfcc.coefficients = ParseUnsigned<std::size_t>(key, v);
  else if (key == "mfcc.fft_size") cfg.mfcc.fft_size = ParseUnsigned<std::size_t>(key, v);
  else throw InvalidArgument("unknown config key '" + key + "'");
}

void ApplyRunConfigText(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(n) + ": expected key=value");
    try {
      SetRunConfigValue(cfg, Trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("config line " + std::to_string(n) + ": " + e.what());
    }
  }
}

void ApplyRunConfigFile(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  ApplyRunConfigText(cfg, ss.str());
}

std::string FormatRunConfig(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "modality=" << ModalityName(c.modality) << "\n"
     << "model=" << c.model << "\n"
     << "profiles=" << c.profiles << "\n"
     << "image_threshold=" << c.image_threshold << "\n"
     << "audio_threshold=" << c.audio_threshold << "\n"
     << "alpha=" << c.alpha << "\n"
     << "k=" << c.k << "\n"
     << "crop_size=" << c.crop_size << "\n"
     << "n_samples=" << c.n_samples << "\n"
     << "seed=" << c.seed << "\n"
     << "workers=" << c.workers << "\n"
     << "output=" << c.output << "\n"
     << "mfcc.sample_rate=" << c.mfcc.sample_rate << "\n"
     << "mfcc.frame_len=" << c.mfcc.frame_len << "\n"
     << "mfcc.hop=" << c.mfcc.hop << "\n"
     << "mfcc.mel_bands=" << c.mfcc.mel_bands << "\n"
     << "mfcc.coefficients=" << c.mfcc.coefficients << "\n"
     << "mfcc.fft_size=" << c.mfcc.fft_size << "\n";
  return os.str();
}

}  // namespace selfcheck
