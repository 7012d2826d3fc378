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

#include "selfcheck/evalkit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "selfcheck/error.h"

namespace selfcheck {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double Rate(std::size_t num, std::size_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

double Median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// NaN ranks below everything.
double Rank(double x) { return std::isnan(x) ? -std::numeric_limits<double>::infinity() : x; }

EvalRecord DefendOne(const Model& model, const ProfileStore& store, const Tensor& input,
                     std::size_t label, const DefenseConfig& cfg) {
  EvalRecord rec;
  rec.label = label;
  const auto start = std::chrono::steady_clock::now();
  try {
    DefenseResult r = Defend(model, input, store, cfg);
    rec.predicted = r.report.predicted;
    rec.inconsistency = r.report.inconsistency;
    rec.verdict = r.report.verdict;
    rec.final_label = r.final_label;
    rec.recovery_ran = r.recovery.has_value();
    if (r.report.verdict == Verdict::kIndeterminate) rec.note = "indeterminate";
    else if (r.report.verdict == Verdict::kAdversarial && !rec.recovery_ran)
      rec.note = "no-region";
  } catch (const RecoveryImpossible&) {
    DetectionReport d = DetectImage(model, input, store, cfg.image_threshold, cfg.alpha);
    rec.predicted = d.predicted;
    rec.inconsistency = d.inconsistency;
    rec.verdict = d.verdict;
    rec.final_label = d.predicted;
    rec.note = "recovery-impossible";
  }
  rec.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

void CheckSet(const LabeledSet& set, const char* name) {
  if (set.empty()) throw InvalidArgument(std::string(name) + " set is empty");
  if (set.labels.size() != set.inputs.size())
    throw InvalidArgument(std::string(name) + " set has mismatched labels");
}

}  // namespace

AttackKind ParseAttackKind(const std::string& s) {
  if (s == "none") return AttackKind::kNone;
  if (s == "patch") return AttackKind::kPatch;
  if (s == "fgsm") return AttackKind::kFgsm;
  if (s == "bim") return AttackKind::kBim;
  throw InvalidArgument("unknown attack: " + s);
}

const char* AttackKindName(AttackKind k) {
  switch (k) {
    case AttackKind::kNone: return "none";
    case AttackKind::kPatch: return "patch";
    case AttackKind::kFgsm: return "fgsm";
    case AttackKind::kBim: return "bim";
  }
  return "?";
}

void AttackConfig::Validate() const {
  if (kind == AttackKind::kFgsm || kind == AttackKind::kBim) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
      throw InvalidArgument("epsilon must be finite and >= 0");
    if (kind == AttackKind::kBim && (!(step > 0.0) || !std::isfinite(step)))
      throw InvalidArgument("BIM step must be > 0");
  }
  if (kind == AttackKind::kPatch) {
    if (patch.content == PatchContent::kFile && patch.path.empty())
      throw InvalidArgument("patch content 'file' needs a path");
    if (patch.content == PatchContent::kOptimized && !(patch_eta > 0.0))
      throw InvalidArgument("patch step size must be > 0");
  }
}

LabeledSet MakeAttackedSet(const Model& model, const LabeledSet& natural,
                           const AttackConfig& attack, const MfccConfig& mfcc,
                           const LabeledSet& pool, Tensor* patch_out) {
  attack.Validate();
  CheckSet(natural, "natural");
  std::mt19937_64 rng(attack.seed);
  LabeledSet out;
  switch (attack.kind) {
    case AttackKind::kNone:
      out = natural;
      break;
    case AttackKind::kPatch: {
      const std::size_t channels = model.input_shape()[0];
      Tensor fixed;
      if (attack.patch.content == PatchContent::kOptimized) {
        const LabeledSet& src = pool.empty() ? natural : pool;
        LabeledSet fit;
        for (std::size_t i = 0; i < src.size(); ++i)
          if (src.labels[i] != attack.patch_target) fit.Add(src.inputs[i], src.labels[i]);
        if (fit.empty()) throw InvalidArgument("no patch-fitting inputs outside the target class");
        fixed = OptimizePatch(model, attack.patch_target, attack.patch, attack.patch_steps,
                              attack.patch_eta, fit, rng())
                    .patch;
      } else if (attack.patch.content == PatchContent::kFile) {
        fixed = LoadTensorFile(attack.patch.path);
        if (fixed.rank() != 3 || fixed.shape()[0] != channels ||
            fixed.shape()[1] != attack.patch.size || fixed.shape()[2] != attack.patch.size)
          throw ShapeError("patch file shape does not match the patch spec");
      }
      for (std::size_t i = 0; i < natural.size(); ++i) {
        const Tensor patch = attack.patch.content == PatchContent::kNoise
                                 ? NoisePatch(channels, attack.patch.size, rng)
                                 : fixed;
        std::size_t top = attack.patch.top, left = attack.patch.left;
        if (attack.patch.random_location)
          std::tie(top, left) = RandomLocation(natural.inputs[i].shape(), attack.patch.size, rng);
        out.Add(ApplyPatch(natural.inputs[i], patch, top, left), natural.labels[i]);
      }
      if (patch_out) *patch_out = fixed;
      break;
    }
    case AttackKind::kFgsm:
    case AttackKind::kBim:
      for (std::size_t i = 0; i < natural.size(); ++i) {
        const std::size_t label = natural.labels[i];
        Tensor adv = attack.kind == AttackKind::kFgsm
                         ? FgsmAudio(model, natural.inputs[i], attack.epsilon, attack.target,
                                     label, mfcc)
                         : BimAudio(model, natural.inputs[i], attack.epsilon, attack.step,
                                    attack.iterations, attack.target, label, mfcc);
        out.Add(std::move(adv), label);
      }
      break;
  }
  return out;
}

double RocAuc(const std::vector<double>& natural, const std::vector<double>& attacked) {
  if (natural.empty() || attacked.empty()) throw InvalidArgument("AUC needs both score sets");
  double wins = 0.0;
  for (double a : attacked) {
    for (double n : natural) {
      const double ra = Rank(a), rn = Rank(n);
      if (ra > rn) wins += 1.0;
      else if (ra == rn) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(natural.size()) * static_cast<double>(attacked.size()));
}

std::vector<SweepPoint> ThresholdSweep(const std::vector<double>& natural,
                                       const std::vector<double>& attacked) {
  std::vector<double> ts;
  for (double x : natural) if (!std::isnan(x)) ts.push_back(x);
  for (double x : attacked) if (!std::isnan(x)) ts.push_back(x);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  auto flagged = [](const std::vector<double>& v, double t) {
    std::size_t c = 0;
    for (double x : v) c += Judge(x, t) == Verdict::kAdversarial;
    return c;
  };
  std::vector<SweepPoint> out;
  out.reserve(ts.size());
  for (double t : ts)
    out.push_back({t, Rate(flagged(attacked, t), attacked.size()),
                   Rate(flagged(natural, t), natural.size())});
  return out;
}

double CalibrateThreshold(const std::vector<double>& natural,
                          const std::vector<double>& attacked) {
  if (natural.empty() || attacked.empty())
    throw InvalidArgument("calibration needs both score sets");
  std::vector<double> ts;
  for (double x : natural) if (!std::isnan(x)) ts.push_back(x);
  for (double x : attacked) if (!std::isnan(x)) ts.push_back(x);
  if (ts.empty()) throw DegenerateInput("no determinate scores to calibrate on");
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<double> candidates = {ts.front() - 1e-6};
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) candidates.push_back(0.5 * (ts[i] + ts[i + 1]));
  candidates.push_back(ts.back());
  double best_j = -2.0, best_t = candidates.front();
  for (double t : candidates) {
    std::size_t tp = 0, fp = 0;
    for (double x : attacked) tp += Judge(x, t) == Verdict::kAdversarial;
    for (double x : natural) fp += Judge(x, t) == Verdict::kAdversarial;
    const double j = Rate(tp, attacked.size()) - Rate(fp, natural.size());
    if (j >= best_j) {
      best_j = j;
      best_t = t;
    }
  }
  return best_t;
}

EvalReport EvaluateSets(const Model& model, const ProfileStore& store, const LabeledSet& natural,
                        const LabeledSet& attacked, const DefenseConfig& defense,
                        const std::string& attack_name, std::size_t workers) {
  CheckSet(natural, "natural");
  CheckSet(attacked, "attacked");
  EvalReport r;
  r.attack = attack_name;
  r.modality = defense.modality;
  r.threshold =
      defense.modality == Modality::kAudio ? defense.audio_threshold : defense.image_threshold;
  r.n_natural = natural.size();
  r.n_attacked = attacked.size();

  const std::size_t total = natural.size() + attacked.size();
  r.records.resize(total);
  auto run = [&](std::size_t i) {
    const bool adv = i >= natural.size();
    const std::size_t j = adv ? i - natural.size() : i;
    const LabeledSet& set = adv ? attacked : natural;
    EvalRecord rec = DefendOne(model, store, set.inputs[j], set.labels[j], defense);
    rec.attacked = adv;
    rec.index = j;
    r.records[i] = std::move(rec);
  };
  workers = std::clamp<std::size_t>(workers, 1, total);
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < total; i += workers) run(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) if (e) std::rethrow_exception(e);
  }

  std::vector<double> dn, da;
  std::size_t nat_ok = 0, nat_ok_after = 0, adv_ok = 0, adv_ok_after = 0, det_ok = 0;
  double ms = 0.0;
  for (const EvalRecord& rec : r.records) {
    ms += rec.elapsed_ms;
    const bool flagged = rec.verdict == Verdict::kAdversarial;
    const bool indet = rec.verdict == Verdict::kIndeterminate;
    if (rec.attacked) {
      da.push_back(rec.inconsistency);
      adv_ok += rec.predicted == rec.label;
      adv_ok_after += rec.final_label == rec.label;
      r.indeterminate_attacked += indet;
      if (flagged) {
        ++r.detected;
        det_ok += rec.final_label == rec.label;
        if (rec.predicted != rec.label) {
          ++r.detected_misclassified;
          r.restored += rec.final_label == rec.label;
        }
      }
    } else {
      dn.push_back(rec.inconsistency);
      nat_ok += rec.predicted == rec.label;
      nat_ok_after += rec.final_label == rec.label;
      r.indeterminate_natural += indet;
      r.false_positives += flagged;
    }
  }
  r.detection_rate = Rate(r.detected, r.n_attacked);
  r.false_positive_rate = Rate(r.false_positives, r.n_natural);
  r.natural_accuracy = Rate(nat_ok, r.n_natural);
  r.accuracy_before = Rate(adv_ok, r.n_attacked);
  r.accuracy_after = Rate(adv_ok_after, r.n_attacked);
  r.natural_accuracy_after = Rate(nat_ok_after, r.n_natural);
  r.detected_correct_after = Rate(det_ok, r.detected);
  r.restored_rate = Rate(r.restored, r.detected_misclassified);
  r.auc = RocAuc(dn, da);
  r.median_natural = Median(dn);
  r.median_attacked = Median(da);
  r.sweep = ThresholdSweep(dn, da);
  r.mean_ms = ms / static_cast<double>(total);
  return r;
}

EvalReport Evaluate(const Model& model, const ProfileStore& store, const LabeledSet& natural,
                    const AttackConfig& attack, const DefenseConfig& defense,
                    const LabeledSet& pool, std::size_t workers) {
  const LabeledSet attacked = MakeAttackedSet(model, natural, attack, defense.mfcc, pool);
  return EvaluateSets(model, store, natural, attacked, defense, AttackKindName(attack.kind),
                      workers);
}

std::vector<double> Scores(const EvalReport& report, bool attacked) {
  std::vector<double> out;
  for (const EvalRecord& rec : report.records)
    if (rec.attacked == attacked) out.push_back(rec.inconsistency);
  return out;
}

std::string FormatEvalReport(const EvalReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "attack=" << r.attack << "\n"
     << "modality=" << ModalityName(r.modality) << "\n"
     << "threshold=" << r.threshold << "\n"
     << "n_natural=" << r.n_natural << "\n"
     << "n_attacked=" << r.n_attacked << "\n"
     << "detected=" << r.detected << "\n"
     << "false_positives=" << r.false_positives << "\n"
     << "indeterminate_natural=" << r.indeterminate_natural << "\n"
     << "indeterminate_attacked=" << r.indeterminate_attacked << "\n"
     << "detection_rate=" << r.detection_rate << "\n"
     << "false_positive_rate=" << r.false_positive_rate << "\n"
     << "natural_accuracy=" << r.natural_accuracy << "\n"
     << "accuracy_before=" << r.accuracy_before << "\n"
     << "accuracy_after=" << r.accuracy_after << "\n"
     << "natural_accuracy_after=" << r.natural_accuracy_after << "\n"
     << "detected_correct_after=" << r.detected_correct_after << "\n"
     << "detected_misclassified=" << r.detected_misclassified << "\n"
     << "restored=" << r.restored << "\n"
     << "restored_rate=" << r.restored_rate << "\n"
     << "auc=" << r.auc << "\n"
     << "median_natural=" << r.median_natural << "\n"
     << "median_attacked=" << r.median_attacked << "\n";
  for (const SweepPoint& p : r.sweep)
    os << "sweep threshold=" << p.threshold << " detection_rate=" << p.detection_rate
       << " false_positive_rate=" << p.false_positive_rate << "\n";
  return os.str();
}

std::string FormatEvalRecords(const EvalReport& r) {
  std::ostringstream os;
  os.precision(6);
  for (const EvalRecord& rec : r.records) {
    os << "set=" << (rec.attacked ? "attacked" : "natural") << " index=" << rec.index
       << " label=" << rec.label << " predicted=" << rec.predicted
       << " inconsistency=" << rec.inconsistency << " verdict=" << VerdictName(rec.verdict)
       << " final=" << rec.final_label << " recovery=" << (rec.recovery_ran ? 1 : 0);
    if (!rec.note.empty()) os << " note=" << rec.note;
    os << "\n";
  }
  return os.str();
}

std::string FormatEvalTiming(const EvalReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "mean_ms=" << r.mean_ms << "\n";
  for (const EvalRecord& rec : r.records)
    os << "set=" << (rec.attacked ? "attacked" : "natural") << " index=" << rec.index
       << " elapsed_ms=" << rec.elapsed_ms << "\n";
  return os.str();
}

}  // namespace selfcheck
