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

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "selfcheck/error.h"
#include "selfcheck/run_config.h"

using namespace selfcheck;

TEST_CASE("run config: defaults carry the published thresholds and k") {
  RunConfig c;
  CHECK(c.image_threshold == 0.46);
  CHECK(c.audio_threshold == 0.11);
  CHECK(c.k == 6);
  CHECK(c.modality == Modality::kImage);
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("run config: key=value text with comments and whitespace") {
  RunConfig c;
  ApplyRunConfigText(c,
                     "# run\n"
                     "modality = audio\n"
                     "\n"
                     "  audio_threshold=0.2  \n"
                     "k=3\n"
                     "mfcc.hop = 80\n"
                     "model = m.lncm\n");
  CHECK(c.modality == Modality::kAudio);
  CHECK(c.audio_threshold == 0.2);
  CHECK(c.k == 3);
  CHECK(c.mfcc.hop == 80);
  CHECK(c.model == "m.lncm");
  CHECK(c.image_threshold == 0.46);
}

TEST_CASE("run config: later assignments override earlier ones") {
  RunConfig c;
  ApplyRunConfigText(c, "alpha=0.5\nalpha=0.3\n");
  SetRunConfigValue(c, "alpha", "0.9");
  CHECK(c.alpha == 0.9);
}

TEST_CASE("run config: errors name the line") {
  RunConfig c;
  try {
    ApplyRunConfigText(c, "k=2\nbogus=1\n");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(ApplyRunConfigText(c, "no equals sign\n"), InvalidArgument);
  CHECK_THROWS_AS(SetRunConfigValue(c, "k", "-1"), InvalidArgument);
  CHECK_THROWS_AS(SetRunConfigValue(c, "alpha", "0.5x"), InvalidArgument);
  CHECK_THROWS_AS(SetRunConfigValue(c, "modality", "video"), InvalidArgument);
}

TEST_CASE("run config: validation") {
  RunConfig c;
  c.image_threshold = -0.1;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = RunConfig{};
  c.alpha = 0.0;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = RunConfig{};
  c.k = 0;
  CHECK_THROWS_AS(c.Validate(), InvalidArgument);
  c = RunConfig{};
  c.mfcc.hop = 0;
  CHECK_THROWS(c.Validate());
}

TEST_CASE("run config: formatted output parses back to the same config") {
  RunConfig c;
  c.modality = Modality::kCombined;
  c.alpha = 0.123456789;
  c.seed = 42;
  c.output = "out/x";
  c.mfcc.mel_bands = 32;
  RunConfig d;
  ApplyRunConfigText(d, FormatRunConfig(c));
  CHECK(FormatRunConfig(d) == FormatRunConfig(c));
  CHECK(d.alpha == c.alpha);
  std::size_t lines = 0;
  for (char ch : FormatRunConfig(c)) lines += ch == '\n';
  CHECK(lines == RunConfigKeys().size());
}

TEST_CASE("run config: files") {
  const std::string path = "run_config_test.cfg";
  {
    std::ofstream f(path);
    f << "n_samples=7\ncrop_size=16\n";
  }
  RunConfig c;
  ApplyRunConfigFile(c, path);
  CHECK(c.n_samples == 7);
  CHECK(c.Profile().crop_size == 16);
  CHECK(c.Defense().k == 6);
  std::remove(path.c_str());
  CHECK_THROWS_AS(ApplyRunConfigFile(c, "does/not/exist.cfg"), InvalidArgument);
}
