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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.h"
#include "fixtures.h"
#include "selfcheck/attacks.h"
#include "selfcheck/complexity.h"
#include "selfcheck/defense.h"
#include "selfcheck/engine.h"
#include "selfcheck/evalkit.h"
#include "selfcheck/evidence.h"
#include "selfcheck/fft.h"
#include "selfcheck/interpret.h"
#include "selfcheck/metrics.h"
#include "selfcheck/model_io.h"
#include "selfcheck/profiles.h"
#include "selfcheck/synthetic.h"
#include "selfcheck/train.h"

using namespace selfcheck;
using namespace selfcheck::testing;

namespace {

// Pinned tolerances and limits.
constexpr double kConvTol = 1e-6;
constexpr double kFftTol = 1e-6;
constexpr double kGradTol = 1e-3;
constexpr double kMetricTol = 1e-9;
constexpr double kAmShare = 0.90;
constexpr double kAmLambda = 0.5;
constexpr double kCleanAccuracy = 0.80;
constexpr double kAucMin = 0.85;
constexpr double kDetectionMin = 0.75;
constexpr double kFprMax = 0.15;
constexpr double kRecoveryMin = 0.50;
constexpr double kPatchAreaMin = 0.12;
constexpr double kVggAnchor = 15300e6;
constexpr double kVggBand = 0.15;
constexpr double kInferenceShareMin = 0.9;

// Harness settings.
constexpr std::size_t kPatchSize = 12;
constexpr double kHarnessAlpha = 0.4;
constexpr double kAudioEps = 0.005;
constexpr double kBimStep = 0.00125;
constexpr std::size_t kBimIters = 10;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void Report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---- 1: conv2d vs nested loops ------------------------------------------

void Criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick(1, 4);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = pick(rng), f = pick(rng), k = pick(rng), s = pick(rng) % 3 + 1,
                      p = pick(rng) % 3;
    const std::size_t h = k + pick(rng) + 1, w = k + pick(rng) + 2;
    LayerSpec l = LayerSpec::Conv2d(c, f, k, s, p);
    RandomizeParameters(l, rng, 1.0f);
    const Tensor in = RandomTensor({c, h, w}, rng);
    const Tensor out = Conv2dForward(in, l);
    const std::vector<double> ref = NaiveConv(in, l);
    if (out.size() != ref.size()) {
      worst = INFINITY;
      break;
    }
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(out[i] - ref[i]));
  }
  const double t = Seconds(start);
  Report(1, "conv2d oracle", worst <= kConvTol && t < 1.0,
         Fmt("50 cases, max abs err %.2e (tol %.0e), %.3fs", worst, kConvTol, t));
}

// ---- 2: fft2d vs naive DFT ----------------------------------------------

void Criterion2() {
  const auto start = Clock::now();
  std::mt19937_64 rng(17);
  double worst = 0.0, parseval = 0.0;
  for (std::size_t h : {1u, 2u, 4u, 8u, 16u, 32u})
    for (std::size_t w : {1u, 2u, 4u, 8u, 16u, 32u}) {
      const Tensor img = RandomTensor({h, w}, rng);
      const Spectrum2d s = Fft2d(img);
      const std::vector<double> x(img.values().begin(), img.values().end());
      const auto ref = NaiveDft2d(x, h, w);
      double scale = 0.0;
      for (const auto& r : ref) scale = std::max(scale, std::abs(r));
      for (std::size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(s.bins[i] - ref[i]) / scale);
      double et = 0.0, ef = 0.0;
      for (double v : x) et += v * v;
      for (const auto& b : s.bins) ef += std::norm(b);
      ef /= static_cast<double>(h * w);
      parseval = std::max(parseval, std::abs(et - ef) / et);
    }
  const double t = Seconds(start);
  Report(2, "fft2d oracle + Parseval", worst <= kFftTol && parseval <= kFftTol && t < 1.0,
         Fmt("sizes 1..32, max rel err %.2e, Parseval rel err %.2e (tol %.0e), %.3fs", worst,
             parseval, kFftTol, t));
}

// ---- 3: input gradient vs central differences ---------------------------

void Criterion3() {
  const auto start = Clock::now();
  const Model m = SmallConvNet(99);
  std::mt19937_64 rng(5);
  const Tensor in = RandomTensor(m.input_shape(), rng);
  const std::vector<double> x(in.values().begin(), in.values().end());
  std::uniform_int_distribution<std::size_t> coord(0, in.size() - 1);
  const double h = 1e-3;
  double worst = 0.0;
  std::set<int> kinds;
  for (std::size_t layer = 0; layer < m.num_layers(); ++layer) {
    kinds.insert(static_cast<int>(m.layer(layer).kind));
    const std::vector<double> act = NaiveForward(m, x, layer);
    std::size_t neuron = 0;
    for (std::size_t j = 0; j < act.size(); ++j)
      if (std::abs(act[j]) > std::abs(act[neuron])) neuron = j;
    const Tensor g = InputGradient(m, in, Objective::Neuron(layer, neuron));
    for (int t = 0; t < 20; ++t) {
      const std::size_t i = coord(rng);
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd =
          (NaiveForward(m, xp, layer)[neuron] - NaiveForward(m, xm, layer)[neuron]) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(double(g[i])), 1e-3});
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
  }
  const double t = Seconds(start);
  Report(3, "input gradient vs FD", worst < kGradTol && t < 10.0,
         Fmt("%zu layer kinds x 20 coords, max rel err %.2e (tol %.0e), %.3fs", kinds.size(),
             worst, kGradTol, t));
}

// ---- 4: metric oracles --------------------------------------------------

void Criterion4() {
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double jerr = 0.0, perr = 0.0, affine = 0.0;
  bool ranges = true;
  for (int t = 0; t < 100; ++t) {
    const double da = u(rng), db = u(rng);
    BinarySpectrum a(4, 8), b(4, 8);
    std::vector<int> ra(32), rb(32);
    for (std::size_t i = 0; i < 32; ++i) {
      ra[i] = u(rng) < da;
      rb[i] = u(rng) < db;
      a.set_bit(i, ra[i]);
      b.set_bit(i, rb[i]);
    }
    const double j = JaccardInconsistency(a, b);
    jerr = std::max(jerr, std::abs(j - BruteJaccardD(ra, rb)));
    ranges &= j >= 0.0 && j <= 1.0;

    // Integer-valued samples and a power-of-two scale keep the affine map
    // exact in float, so only the metric's own arithmetic is measured.
    std::uniform_int_distribution<int> iv(0, 100), len(3, 40), shift(-50, 50);
    const std::size_t n = len(rng);
    std::vector<float> f(n), g(n), fa(n);
    std::vector<double> fd(n), gd(n);
    f[0] = 0.0f;
    f[1] = 1.0f;  // guarantees variance
    g[0] = 1.0f;
    g[1] = 0.0f;
    for (std::size_t i = 2; i < n; ++i) {
      f[i] = static_cast<float>(iv(rng));
      g[i] = static_cast<float>(iv(rng));
    }
    const float scale = static_cast<float>(1 << (t % 5)), off = static_cast<float>(shift(rng));
    for (std::size_t i = 0; i < n; ++i) {
      fd[i] = f[i];
      gd[i] = g[i];
      fa[i] = scale * f[i] + off;
    }
    const double p = PearsonInconsistency(f, g);
    perr = std::max(perr, std::abs(p - BrutePearsonD(fd, gd)));
    ranges &= p >= 0.0 && p <= 2.0;
    affine = std::max(affine, std::abs(PearsonInconsistency(fa, g) - p));
  }
  const double t = Seconds(start);
  Report(4, "metric oracles", jerr <= kMetricTol && perr <= kMetricTol &&
                                  affine <= kMetricTol && ranges && t < 1.0,
         Fmt("JSC err %.1e, PCC-D err %.1e, affine drift %.1e (tol %.0e), ranges %s, %.3fs",
             jerr, perr, affine, kMetricTol, ranges ? "ok" : "violated", t));
}

// ---- shared toy image model --------------------------------------------

struct ImageSetup {
  Model model = ToyImageModel(3);
  LabeledSet train, calibration, test;
  double train_seconds = 0.0;
};

const ImageSetup& Image() {
  static ImageSetup s = [] {
    ImageSetup s;
    const auto start = Clock::now();
    s.train = MakeShapeSet(100, 1);
    s.calibration = MakeShapeSet(10, 3);
    s.test = MakeShapeSet(10, 5);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 5e-3;
    s.model = Train(s.model, s.train, cfg);
    s.train_seconds = Seconds(start);
    return s;
  }();
  return s;
}

// ---- 5: AM regularization direction -------------------------------------

void Criterion5() {
  const ImageSetup& img = Image();
  const auto start = Clock::now();
  const Model& m = img.model;
  const std::size_t layer = m.last_conv();
  const std::size_t n = NumElements(m.output_shape(layer));
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  int wins = 0;
  double plain_sum = 0.0, reg_sum = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Objective neuron = Objective::Neuron(layer, pick(rng));
    AmConfig plain;
    plain.steps = 50;
    plain.eta = 0.1;
    plain.seed = static_cast<std::uint64_t>(i);
    AmConfig reg = plain;
    reg.regularized = true;
    reg.lambda = kAmLambda;
    const double a = ActivationMaximization(m, neuron, plain).final_activation;
    const double b = ActivationMaximization(m, neuron, reg).final_activation;
    wins += a > b;
    plain_sum += a;
    reg_sum += b;
  }
  const double share = wins / 20.0;
  const double t = Seconds(start);
  Report(5, "AM regularization direction", share >= kAmShare && t < 120.0,
         Fmt("unregularized > regularized (lambda %.2g) on %d/20 neurons (need %.0f%%), "
             "mean %.2f vs %.2f, %.1fs (shared model training %.1fs)",
             kAmLambda, wins, kAmShare * 100, plain_sum / 20, reg_sum / 20, t,
             img.train_seconds));
}

// ---- 6: image defense ---------------------------------------------------

struct DefenseRun {
  EvalReport report;
  double threshold = 0.0;
};

AttackConfig NoisePatches(std::uint64_t seed) {
  AttackConfig a;
  a.kind = AttackKind::kPatch;
  a.patch.size = kPatchSize;
  a.patch.content = PatchContent::kNoise;
  a.seed = seed;
  return a;
}

DefenseRun image_run;
double image_seconds = 0.0;

void Criterion6() {
  const auto start = Clock::now();
  const ImageSetup& img = Image();
  const Model& m = img.model;
  const double clean = Accuracy(m, img.test);
  ProfileConfig pc;
  pc.alpha = kHarnessAlpha;
  pc.crop_size = 32;
  pc.n_samples = 50;
  const ProfileStore store = BuildImageStore(m, img.train, pc);
  DefenseConfig dc;
  dc.modality = Modality::kImage;
  dc.alpha = kHarnessAlpha;

  const EvalReport cal = Evaluate(m, store, img.calibration, NoisePatches(101), dc);
  dc.image_threshold = CalibrateThreshold(Scores(cal, false), Scores(cal, true));
  image_run.threshold = dc.image_threshold;
  image_run.report = Evaluate(m, store, img.test, NoisePatches(202), dc);
  const EvalReport& r = image_run.report;

  const double area = double(kPatchSize * kPatchSize) / double(kShapeSize * kShapeSize);
  image_seconds = Seconds(start) + img.train_seconds;
  const bool pass = clean >= kCleanAccuracy && area >= kPatchAreaMin && r.auc >= kAucMin &&
                    r.detection_rate >= kDetectionMin && r.false_positive_rate <= kFprMax &&
                    r.detected_correct_after >= kRecoveryMin && image_seconds < 600.0;
  Report(6, "image defense", pass,
         Fmt("clean acc %.3f, patch %.0f%% area, AUC %.3f, threshold %.3f: DSR %.2f FPR %.2f, "
             "correct after recovery %.2f of detected (acc %.2f -> %.2f), %.0fs",
             clean, area * 100, r.auc, image_run.threshold, r.detection_rate,
             r.false_positive_rate, r.detected_correct_after, r.accuracy_before,
             r.accuracy_after, image_seconds));
}

// ---- 7: audio defense ---------------------------------------------------

struct AudioSetup {
  Model model = ToyAudioModel(3);
  LabeledSet train, calibration, test;
  ProfileStore store;
  double seconds = 0.0;
};

const AudioSetup& Audio() {
  static AudioSetup s = [] {
    AudioSetup s;
    const auto start = Clock::now();
    const MfccConfig mf;
    s.train = MakeKeywordSet(60, 1);
    s.calibration = MakeKeywordSet(13, 3);
    s.test = MakeKeywordSet(13, 5);
    LabeledSet features;
    for (std::size_t i = 0; i < s.train.size(); ++i)
      features.Add(AudioFeatures(s.model, s.train.inputs[i], mf), s.train.labels[i]);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 3e-3;
    s.model = Train(s.model, features, cfg);
    ProfileConfig pc;
    pc.n_samples = 50;
    pc.k = kDefaultTopK;
    s.store = BuildAudioStore(s.model, s.train, pc, mf);
    s.seconds = Seconds(start);
    return s;
  }();
  return s;
}

AttackConfig AudioAttack(AttackKind kind, std::uint64_t seed) {
  AttackConfig a;
  a.kind = kind;
  a.epsilon = kAudioEps;
  a.step = kBimStep;
  a.iterations = kBimIters;
  a.seed = seed;
  return a;
}

DefenseRun fgsm_run, bim_run;

void Criterion7() {
  const auto start = Clock::now();
  const AudioSetup& aud = Audio();
  DefenseConfig dc;
  dc.modality = Modality::kAudio;
  dc.k = kDefaultTopK;
  LabeledSet feats;
  for (std::size_t i = 0; i < aud.test.size(); ++i)
    feats.Add(AudioFeatures(aud.model, aud.test.inputs[i], dc.mfcc), aud.test.labels[i]);
  const double clean = Accuracy(aud.model, feats);

  auto run = [&](AttackKind kind, DefenseRun& out) {
    const EvalReport cal = Evaluate(aud.model, aud.store, aud.calibration, AudioAttack(kind, 11), dc);
    DefenseConfig d = dc;
    d.audio_threshold = CalibrateThreshold(Scores(cal, false), Scores(cal, true));
    out.threshold = d.audio_threshold;
    out.report = Evaluate(aud.model, aud.store, aud.test, AudioAttack(kind, 22), d);
  };
  run(AttackKind::kFgsm, fgsm_run);
  run(AttackKind::kBim, bim_run);
  const double t = Seconds(start) + aud.seconds;

  auto ok = [](const EvalReport& r) { return r.auc >= kAucMin && r.restored_rate >= kRecoveryMin; };
  auto line = [](const char* name, const DefenseRun& d) {
    const EvalReport& r = d.report;
    return Fmt("%s: AUC %.3f, acc %.2f -> %.2f, restored %zu/%zu detected misclassified (%.2f)",
               name, r.auc, r.accuracy_before, r.accuracy_after, r.restored,
               r.detected_misclassified, r.restored_rate);
  };
  const bool pass = KeywordLabels().size() >= 8 && ok(fgsm_run.report) && ok(bim_run.report) &&
                    t < 600.0;
  Report(7, "audio defense", pass,
         Fmt("%zu classes, clean acc %.3f, eps %.3f, k=%zu; ", KeywordLabels().size(), clean,
             kAudioEps, kDefaultTopK) +
             line("FGSM", fgsm_run) + "; " + line("BIM", bim_run) + Fmt("; %.0fs", t));
}

// ---- 8: pass counts -----------------------------------------------------

void Criterion8() {
  const ImageSetup& img = Image();
  const AudioSetup& aud = Audio();
  ProfileConfig pc;
  pc.alpha = kHarnessAlpha;
  pc.n_samples = 10;
  const ProfileStore store = BuildImageStore(img.model, img.train, pc);
  bool pass = true;
  std::string notes;
  int adv_seen = 0, nat_seen = 0;

  std::mt19937_64 rng(8);
  for (std::size_t i = 0; i < 20; ++i) {
    const Tensor& x = img.test.inputs[i];
    PassCounter c;
    DetectImage(img.model, x, store, 0.4, kHarnessAlpha, &c);
    pass &= c.full == 1 && c.head == 0;
    const auto [top, left] = RandomLocation(x.shape(), kPatchSize, rng);
    const Tensor adv = ApplyPatch(x, NoisePatch(1, kPatchSize, rng), top, left);
    for (const Tensor* in : {&x, &adv}) {
      DefenseConfig dc;
      dc.alpha = kHarnessAlpha;
      dc.image_threshold = 0.4;
      try {
        const DefenseResult r = Defend(img.model, *in, store, dc);
        const int expect = r.recovery ? 2 : 1;
        pass &= r.passes.full == expect && r.passes.head == 0;
        (r.recovery ? adv_seen : nat_seen)++;
      } catch (const RecoveryImpossible&) {
      }
    }
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const Tensor& w = aud.test.inputs[i];
    PassCounter c;
    DetectAudio(aud.model, w, aud.store, 0.11, {}, &c);
    pass &= c.full == 1 && c.head == 0;
    for (double thr : {1e9, 0.0}) {
      DefenseConfig dc;
      dc.modality = Modality::kAudio;
      dc.audio_threshold = thr;
      const DefenseResult r = Defend(aud.model, w, aud.store, dc);
      pass &= r.passes.full == 1 && r.passes.head == (r.recovery ? 1 : 0);
    }
  }
  pass &= adv_seen > 0 && nat_seen > 0;
  Report(8, "one-inference property", pass,
         Fmt("detect: 1 full pass; defend image: 1 (natural, %d) or 2 (recovered, %d); "
             "defend audio: 1 full + 1 head when recovering",
             nat_seen, adv_seen));
}

// ---- 9: FLOPs anchor ----------------------------------------------------

void Criterion9() {
  const LayerTable vgg = Vgg16Table(224, 1000);
  const double c = static_cast<double>(FlopsInference(vgg));
  const CostBreakdown b = PipelineCost(vgg, Scenario::kImage);
  const double rel = std::abs(c - kVggAnchor) / kVggAnchor;
  const double share = b.InferenceShare();
  const double single = static_cast<double>(b.inference) /
                        static_cast<double>(b.total - b.reinference);
  Report(9, "FLOPs anchor",
         rel <= kVggBand && share > kInferenceShareMin && single > kInferenceShareMin,
         Fmt("VGG-16 C_C %.1fM vs 15300M (%.1f%% off, band %.0f%%); C_C share %.4f with one "
             "inference, %.4f counting the re-inference",
             c / 1e6, rel * 100, kVggBand * 100, single, share));
}

// ---- 10: separation direction ------------------------------------------

void Criterion10(bool have6, bool have7) {
  if (!have6 && !have7) return;
  bool pass = true;
  std::string d;
  auto add = [&](const char* name, const EvalReport& r) {
    pass &= r.median_attacked > r.median_natural;
    d += Fmt("%s median D attacked %.3f > natural %.3f; ", name, r.median_attacked,
             r.median_natural);
  };
  if (have6) add("image", image_run.report);
  if (have7) {
    add("FGSM", fgsm_run.report);
    add("BIM", bim_run.report);
  }
  Report(10, "separation direction", pass, d);
}

// ---- 11: determinism ----------------------------------------------------

void Criterion11() {
  const ImageSetup& img = Image();
  const AudioSetup& aud = Audio();
  ProfileConfig pc;
  pc.alpha = kHarnessAlpha;
  pc.n_samples = 10;
  const ProfileStore a = BuildImageStore(img.model, img.train, pc);
  const ProfileStore b = BuildImageStore(img.model, img.train, pc);
  bool same = SaveProfiles(a) == SaveProfiles(b);

  LabeledSet nat;
  for (std::size_t i = 0; i < 30; ++i) nat.Add(img.test.inputs[i], img.test.labels[i]);
  DefenseConfig dc;
  dc.alpha = kHarnessAlpha;
  dc.image_threshold = 0.4;
  const EvalReport r1 = Evaluate(img.model, a, nat, NoisePatches(7), dc);
  const EvalReport r2 = Evaluate(img.model, b, nat, NoisePatches(7), dc, {}, 2);
  same &= FormatEvalReport(r1) == FormatEvalReport(r2) &&
          FormatEvalRecords(r1) == FormatEvalRecords(r2);

  LabeledSet clips;
  for (std::size_t i = 0; i < 8; ++i) clips.Add(aud.test.inputs[i], aud.test.labels[i]);
  DefenseConfig ac;
  ac.modality = Modality::kAudio;
  const EvalReport r3 = Evaluate(aud.model, aud.store, clips, AudioAttack(AttackKind::kBim, 5), ac);
  const EvalReport r4 = Evaluate(aud.model, aud.store, clips, AudioAttack(AttackKind::kBim, 5), ac);
  same &= FormatEvalReport(r3) == FormatEvalReport(r4) &&
          FormatEvalRecords(r3) == FormatEvalRecords(r4);
  Report(11, "determinism", same,
         "profile bytes, image eval (1 vs 2 workers) and audio BIM eval reports/records "
         "byte-identical on rerun");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
  const std::vector<std::pair<int, std::function<void()>>> criteria = {
      {1, Criterion1}, {2, Criterion2}, {3, Criterion3}, {4, Criterion4}, {5, Criterion5},
      {6, Criterion6}, {7, Criterion7}, {8, Criterion8}, {9, Criterion9}};
  for (const auto& [id, fn] : criteria) {
    if (!want(id)) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      Report(id, "criterion", false, std::string("threw: ") + e.what());
    }
  }
  if (want(10)) Criterion10(want(6), want(7));
  if (want(11)) {
    try {
      Criterion11();
    } catch (const std::exception& e) {
      Report(11, "determinism", false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
