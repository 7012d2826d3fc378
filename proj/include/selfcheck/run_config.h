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

// Flat key=value run configuration shared by the command-line tool.
//
//   # comment
//   modality = image
//   image_threshold = 0.46
//   mfcc.hop = 160
//
// Blank lines and '#' comments are ignored; whitespace around keys and
// values is trimmed. Unknown keys and malformed values are errors.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selfcheck/defense.h"
#include "selfcheck/mfcc.h"
#include "selfcheck/profiles.h"

namespace selfcheck {

struct RunConfig {
  Modality modality = Modality::kImage;
  std::string model;
  std::string profiles;
  double image_threshold = kDefaultImageThreshold;
  double audio_threshold = kDefaultAudioThreshold;
  double alpha = 0.7;
  std::size_t k = kDefaultTopK;
  std::size_t crop_size = 32;
  std::size_t n_samples = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string output;
  MfccConfig mfcc;

  // Thresholds >= 0, alpha in (0,1], k >= 1, consistent MFCC settings.
  void Validate() const;

  DefenseConfig Defense() const;
  ProfileConfig Profile() const;
};

// Every accepted key, in documentation order.
const std::vector<std::string>& RunConfigKeys();

void SetRunConfigValue(RunConfig& cfg, const std::string& key, const std::string& value);

// Applies the file's assignments on top of `cfg`. Errors name the line.
void ApplyRunConfigText(RunConfig& cfg, const std::string& text);
void ApplyRunConfigFile(RunConfig& cfg, const std::string& path);

// One key=value line per key, in RunConfigKeys order.
std::string FormatRunConfig(const RunConfig& cfg);

}  // namespace selfcheck
