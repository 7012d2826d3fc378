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

// selfcheck: command-line front end for profiling, attacking, defending and
// evaluating the self-verification pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfcheck/attacks.h"
#include "selfcheck/complexity.h"
#include "selfcheck/dataset.h"
#include "selfcheck/defense.h"
#include "selfcheck/error.h"
#include "selfcheck/evalkit.h"
#include "selfcheck/evidence.h"
#include "selfcheck/model_io.h"
#include "selfcheck/profiles.h"
#include "selfcheck/run_config.h"
#include "selfcheck/synthetic.h"
#include "selfcheck/train.h"

namespace fs = std::filesystem;
using namespace selfcheck;

namespace {

// Run-config flags of one subcommand. Values are kept as text and applied on
// top of the config file after parsing, so only flags actually given win.
struct RunFlags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> sets;

  void Add(CLI::App* app, const std::string& key, const std::string& flag,
           const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  RunConfig Resolve() const {
    RunConfig cfg;
    if (!config.empty()) ApplyRunConfigFile(cfg, config);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) SetRunConfigValue(cfg, key, values.at(key));
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got " + s);
      SetRunConfigValue(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.Validate();
    return cfg;
  }
};

void AddRunFlags(CLI::App* app, RunFlags& f, bool defense_flags) {
  app->add_option("-c,--config", f.config, "key=value run configuration file")
      ->check(CLI::ExistingFile);
  f.Add(app, "modality", "--modality", "image | audio | combined");
  f.Add(app, "model", "-m,--model", "model file (LNCM)");
  f.Add(app, "seed", "--seed", "random seed");
  f.Add(app, "output", "-o,--output", "output path");
  if (defense_flags) {
    f.Add(app, "profiles", "-p,--profiles", "profile file (LNCP)");
    f.Add(app, "image_threshold", "--image-threshold", "image inconsistency threshold (0.46)");
    f.Add(app, "audio_threshold", "--audio-threshold", "audio inconsistency threshold (0.11)");
    f.Add(app, "alpha", "--alpha", "CAM localization fraction (0.7)");
    f.Add(app, "k", "-k,--k", "top-k activations suppressed in audio recovery (6)");
    f.Add(app, "crop_size", "--crop-size", "profile crop size (32)");
    f.Add(app, "n_samples", "--n-samples", "profile samples per class (100)");
    f.Add(app, "workers", "--workers", "eval worker threads (1)");
  }
  app->add_option("--set", f.sets, "extra key=value config assignment (e.g. mfcc.hop=160)");
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw InvalidArgument(std::string("no ") + what + " given");
  if (!fs::is_regular_file(path)) throw InvalidArgument(std::string(what) + " not found: " + path);
}

void RequireOutput(const RunConfig& cfg) {
  if (cfg.output.empty()) throw InvalidArgument("no output path given (-o)");
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

struct Served {
  Model model;
  ProfileStore store;
};

Served LoadServing(const RunConfig& cfg) {
  RequireFile(cfg.model, "model");
  RequireFile(cfg.profiles, "profile file");
  Model model = LoadModelFile(cfg.model);
  ProfileStore store = LoadProfilesFile(cfg.profiles, ModelFingerprint(model));
  return {std::move(model), std::move(store)};
}

// ---- synth / train --------------------------------------------------------

struct SynthArgs {
  RunFlags run;
  std::size_t per_class = 20;
};

int RunSynth(const SynthArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  RequireOutput(cfg);
  const LabeledSet set = cfg.modality == Modality::kAudio ? MakeKeywordSet(a.per_class, cfg.seed)
                                                          : MakeShapeSet(a.per_class, cfg.seed);
  SaveDataset(set, cfg.output);
  std::cout << "wrote " << set.size() << " samples to " << cfg.output << "\n";
  return 0;
}

struct TrainArgs {
  RunFlags run;
  std::string data;
  std::size_t per_class = 100;
  TrainConfig train;
  bool untrained = false;
};

int RunTrain(TrainArgs a) {
  const RunConfig cfg = a.run.Resolve();
  RequireOutput(cfg);
  const bool audio = cfg.modality == Modality::kAudio;
  Model model = audio ? ToyAudioModel(cfg.seed) : ToyImageModel(cfg.seed);
  if (!a.untrained) {
    LabeledSet data;
    if (!a.data.empty()) {
      data = LoadDataset(a.data);
    } else {
      data = audio ? MakeKeywordSet(a.per_class, cfg.seed) : MakeShapeSet(a.per_class, cfg.seed);
    }
    if (audio) {
      LabeledSet features;
      for (std::size_t i = 0; i < data.size(); ++i)
        features.Add(AudioFeatures(model, data.inputs[i], cfg.mfcc), data.labels[i]);
      data = std::move(features);
    }
    a.train.seed = cfg.seed;
    TrainStats stats;
    model = Train(model, data, a.train, &stats);
    for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
      std::cout << "epoch=" << e + 1 << " loss=" << stats.epoch_loss[e] << "\n";
    std::cout << "train_accuracy=" << Accuracy(model, data) << "\n";
  }
  SaveModelFile(model, cfg.output);
  std::cout << "fingerprint=" << std::hex << ModelFingerprint(model) << std::dec << "\n";
  return 0;
}

// ---- profile --------------------------------------------------------------

struct ProfileArgs {
  RunFlags run;
  std::string data;
};

int RunProfile(const ProfileArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  RequireFile(cfg.model, "model");
  RequireOutput(cfg);
  const Model model = LoadModelFile(cfg.model);
  const LabeledSet data = LoadDataset(a.data);
  if (data.empty()) throw InvalidArgument("dataset " + a.data + " is empty");
  const ProfileConfig pc = cfg.Profile();
  ProfileStore store(ModelFingerprint(model), pc);
  const std::set<std::size_t> classes(data.labels.begin(), data.labels.end());
  for (std::size_t c : classes) {
    if (c >= model.num_classes())
      throw InvalidArgument("dataset label " + std::to_string(c) + " exceeds model classes");
    if (cfg.modality == Modality::kAudio) {
      store.Put(BuildAudioProfile(model, data, c, pc, cfg.mfcc));
    } else {
      store.Put(BuildImageProfile(model, data, c, pc));
      if (cfg.modality == Modality::kCombined) store.Put(BuildActivationProfile(model, data, c, pc));
    }
  }
  SaveProfilesFile(store, cfg.output);
  std::cout << "profiles=" << store.size() << " classes=" << classes.size() << " output="
            << cfg.output << "\n";
  return 0;
}

// ---- detect / recover / defend --------------------------------------------

struct InputArgs {
  RunFlags run;
  std::string input;
  bool time = false;
};

DetectionReport Detect(const Served& s, const RunConfig& cfg, const Tensor& input,
                       ForwardResult* fwd) {
  switch (cfg.modality) {
    case Modality::kAudio:
      return DetectAudio(s.model, input, s.store, cfg.audio_threshold, cfg.mfcc, nullptr, fwd);
    case Modality::kImage:
      return DetectImage(s.model, input, s.store, cfg.image_threshold, cfg.alpha, nullptr, fwd);
    case Modality::kCombined:
      break;
  }
  return Defend(s.model, input, s.store, cfg.Defense()).report;
}

int RunDetect(const InputArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  const Served s = LoadServing(cfg);
  const Tensor input = LoadTensorFile(a.input);
  std::cout << FormatReport(Detect(s, cfg, input, nullptr), s.model, a.time) << "\n";
  return 0;
}

int RunRecover(const InputArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  if (cfg.modality == Modality::kCombined)
    throw InvalidArgument("recover needs modality image or audio");
  const Served s = LoadServing(cfg);
  const Tensor input = LoadTensorFile(a.input);
  ForwardResult fwd;
  const DetectionReport r = Detect(s, cfg, input, &fwd);
  std::cout << FormatReport(r, s.model, a.time) << "\n";
  RecoveryOutcome out;
  if (cfg.modality == Modality::kAudio) {
    if (r.verdict == Verdict::kIndeterminate) throw DegenerateInput("no activation evidence");
    out = RecoverAudio(s.model, fwd, s.store, r.predicted, cfg.k);
  } else {
    if (!r.region) throw NoPrimarySource("no localized region to inpaint");
    out = RecoverImage(s.model, input, *r.region, fwd);
    if (!cfg.output.empty()) SaveTensorFile(out.recovered, cfg.output);
  }
  std::cout << FormatRecovery(out, s.model) << "\n";
  return 0;
}

int RunDefend(const InputArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  const Served s = LoadServing(cfg);
  const Tensor input = LoadTensorFile(a.input);
  const DefenseResult r = Defend(s.model, input, s.store, cfg.Defense());
  std::cout << FormatReport(r.report, s.model, a.time) << "\n";
  if (r.recovery) {
    std::cout << FormatRecovery(*r.recovery, s.model) << "\n";
    if (!cfg.output.empty() && cfg.modality != Modality::kAudio)
      SaveTensorFile(r.recovery->recovered, cfg.output);
  }
  std::cout << "final=" << r.final_label << " final_label=" << s.model.labels()[r.final_label]
            << " full_passes=" << r.passes.full << " head_passes=" << r.passes.head << "\n";
  return 0;
}

// ---- attack / eval --------------------------------------------------------

struct AttackFlags {
  std::string kind = "patch";
  std::string content = "noise";
  std::size_t target = 0;
  bool targeted = false;
  std::string patch_out;
  AttackConfig cfg;

  void Add(CLI::App* app) {
    app->add_option("--attack", kind, "none | patch | fgsm | bim")->capture_default_str();
    app->add_option("--patch-size", cfg.patch.size, "patch side in pixels")->capture_default_str();
    app->add_option("--patch-content", content, "optimized | noise | file")->capture_default_str();
    app->add_option("--patch-file", cfg.patch.path, "patch tensor for content=file");
    app->add_option("--patch-target", cfg.patch_target, "target class of optimized patches");
    app->add_option("--patch-steps", cfg.patch_steps, "optimization steps")->capture_default_str();
    app->add_option("--patch-eta", cfg.patch_eta, "optimization step size")->capture_default_str();
    app->add_option("--patch-out", patch_out, "write the fitted patch tensor here");
    app->add_option("--epsilon", cfg.epsilon, "audio L-inf budget")->capture_default_str();
    app->add_option("--step", cfg.step, "BIM step size")->capture_default_str();
    app->add_option("--iterations", cfg.iterations, "BIM iterations")->capture_default_str();
    app->add_option("--target", target, "targeted audio attack toward this class")
        ->each([this](const std::string&) { targeted = true; });
  }

  AttackConfig Resolve(const RunConfig& run) const {
    AttackConfig a = cfg;
    a.kind = ParseAttackKind(kind);
    a.patch.content = ParsePatchContent(content);
    if (targeted) a.target = target;
    a.seed = run.seed;
    a.Validate();
    return a;
  }
};

struct AttackArgs {
  RunFlags run;
  AttackFlags attack;
  std::string data;
  std::string pool;
};

int RunAttack(const AttackArgs& a) {
  const RunConfig cfg = a.run.Resolve();
  RequireFile(cfg.model, "model");
  RequireOutput(cfg);
  const Model model = LoadModelFile(cfg.model);
  const AttackConfig atk = a.attack.Resolve(cfg);
  const LabeledSet natural = LoadDataset(a.data);
  const LabeledSet pool = a.pool.empty() ? LabeledSet{} : LoadDataset(a.pool);
  Tensor patch;
  const LabeledSet adv = MakeAttackedSet(model, natural, atk, cfg.mfcc, pool, &patch);
  SaveDataset(adv, cfg.output);
  if (!a.attack.patch_out.empty() && patch.size() > 0) SaveTensorFile(patch, a.attack.patch_out);
  std::size_t fooled = 0;
  for (std::size_t i = 0; i < adv.size(); ++i) {
    const Tensor x = cfg.modality == Modality::kAudio
                         ? AudioFeatures(model, adv.inputs[i], cfg.mfcc)
                         : adv.inputs[i];
    fooled += Forward(model, x).predicted != adv.labels[i];
  }
  std::cout << "attack=" << AttackKindName(atk.kind) << " samples=" << adv.size()
            << " misclassified=" << fooled << " output=" << cfg.output << "\n";
  return 0;
}

struct EvalArgs {
  RunFlags run;
  AttackFlags attack;
  std::string data;
  std::string pool;
  std::string calibrate;
};

int RunEval(const EvalArgs& a) {
  RunConfig cfg = a.run.Resolve();
  RequireOutput(cfg);
  const Served s = LoadServing(cfg);
  const AttackConfig atk = a.attack.Resolve(cfg);
  const LabeledSet natural = LoadDataset(a.data);
  if (natural.empty()) throw InvalidArgument("natural dataset " + a.data + " is empty");
  const LabeledSet pool = a.pool.empty() ? LabeledSet{} : LoadDataset(a.pool);
  if (cfg.modality == Modality::kAudio && atk.kind != AttackKind::kNone)
    std::cerr << "note: audio attacks perturb the waveform through the MFCC front end\n";

  if (!a.calibrate.empty()) {
    const LabeledSet cal = LoadDataset(a.calibrate);
    AttackConfig cal_atk = atk;
    cal_atk.seed = atk.seed + 1;
    const EvalReport r =
        Evaluate(s.model, s.store, cal, cal_atk, cfg.Defense(), pool, cfg.workers);
    const double t = CalibrateThreshold(Scores(r, false), Scores(r, true));
    if (cfg.modality == Modality::kAudio) cfg.audio_threshold = t;
    else cfg.image_threshold = t;
    std::cerr << "calibrated threshold=" << t << "\n";
  }
  const EvalReport r = Evaluate(s.model, s.store, natural, atk, cfg.Defense(), pool, cfg.workers);
  const std::string report = FormatEvalReport(r);
  WriteText(cfg.output + ".report", report);
  WriteText(cfg.output + ".records", FormatEvalRecords(r));
  WriteText(cfg.output + ".timing", FormatEvalTiming(r));
  std::cout << report << "mean_ms=" << r.mean_ms << "\n";
  return 0;
}

// ---- flops ----------------------------------------------------------------

struct FlopsArgs {
  std::string model;
  bool vgg16 = false;
  std::string scenario = "image";
  PipelineOptions opt;
};

int RunFlops(const FlopsArgs& a) {
  if (a.model.empty() == !a.vgg16) throw InvalidArgument("give exactly one of --model, --vgg16");
  const LayerTable table = a.vgg16 ? Vgg16Table() : TableOf(LoadModelFile(a.model));
  const Scenario sc = ParseScenario(a.scenario);
  std::cout << FormatBreakdown(PipelineCost(table, sc, a.opt), sc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfcheck: self-verification defense against physical adversarial inputs"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* c_synth = app.add_subcommand("synth", "write a synthetic shapes or keywords dataset");
  AddRunFlags(c_synth, synth.run, false);
  c_synth->add_option("--per-class", synth.per_class, "samples per class")->capture_default_str();

  TrainArgs train;
  CLI::App* c_train = app.add_subcommand("train", "train a toy image or audio model");
  AddRunFlags(c_train, train.run, false);
  c_train->add_option("--data", train.data, "dataset directory (default: synthesize)")
      ->check(CLI::ExistingDirectory);
  c_train->add_option("--per-class", train.per_class, "synthetic samples per class")
      ->capture_default_str();
  c_train->add_option("--epochs", train.train.epochs)->capture_default_str();
  c_train->add_option("--batch", train.train.batch)->capture_default_str();
  c_train->add_option("--lr", train.train.learning_rate)->capture_default_str();
  c_train->add_flag("--untrained", train.untrained, "write the initialized model only");

  ProfileArgs profile;
  CLI::App* c_profile = app.add_subcommand("profile", "build per-class profiles");
  AddRunFlags(c_profile, profile.run, true);
  c_profile->add_option("--data", profile.data, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  InputArgs detect, recover, defend;
  CLI::App* c_detect = app.add_subcommand("detect", "self-verify one input");
  CLI::App* c_recover = app.add_subcommand("recover", "detect, then recover one input");
  CLI::App* c_defend = app.add_subcommand("defend", "detect and recover when flagged");
  for (auto [cmd, args] : {std::pair{c_detect, &detect}, std::pair{c_recover, &recover},
                           std::pair{c_defend, &defend}}) {
    AddRunFlags(cmd, args->run, true);
    cmd->add_option("-i,--input", args->input, "input tensor (LNCT)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--time", args->time, "include elapsed_ms in the report");
  }

  AttackArgs attack;
  CLI::App* c_attack = app.add_subcommand("attack", "write an attacked copy of a dataset");
  AddRunFlags(c_attack, attack.run, false);
  attack.attack.Add(c_attack);
  c_attack->add_option("--data", attack.data, "natural dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_attack->add_option("--pool", attack.pool, "patch-fitting dataset directory")
      ->check(CLI::ExistingDirectory);

  EvalArgs eval;
  CLI::App* c_eval = app.add_subcommand("eval", "run the evaluation harness");
  AddRunFlags(c_eval, eval.run, true);
  eval.attack.Add(c_eval);
  c_eval->add_option("--data", eval.data, "natural dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_eval->add_option("--pool", eval.pool, "patch-fitting dataset directory")
      ->check(CLI::ExistingDirectory);
  c_eval->add_option("--calibrate", eval.calibrate,
                     "calibrate the threshold on this natural dataset first")
      ->check(CLI::ExistingDirectory);

  FlopsArgs flops;
  CLI::App* c_flops = app.add_subcommand("flops", "print the analytic cost breakdown");
  c_flops->add_option("-m,--model", flops.model, "model file")->check(CLI::ExistingFile);
  c_flops->add_flag("--vgg16", flops.vgg16, "use the VGG-16 layer table at 224x224");
  c_flops->add_option("--scenario", flops.scenario, "image | audio")->capture_default_str();
  c_flops->add_option("--crop-size", flops.opt.crop_size)->capture_default_str();
  c_flops->add_option("--region-pixels", flops.opt.region_pixels, "0 means crop^2");
  c_flops->add_option("--flops-per-mac", flops.opt.cost.flops_per_mac)->capture_default_str();
  c_flops->add_flag("!--no-recovery", flops.opt.include_recovery, "omit recovery steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_synth) return RunSynth(synth);
    if (*c_train) return RunTrain(train);
    if (*c_profile) return RunProfile(profile);
    if (*c_detect) return RunDetect(detect);
    if (*c_recover) return RunRecover(recover);
    if (*c_defend) return RunDefend(defend);
    if (*c_attack) return RunAttack(attack);
    if (*c_eval) return RunEval(eval);
    if (*c_flops) return RunFlops(flops);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
