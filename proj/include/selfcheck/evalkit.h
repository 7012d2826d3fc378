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

// Evaluation harness: builds attacked copies of a natural set, runs the
// defense over both, and aggregates detection and recovery rates.
//
// Report layout (FormatEvalReport), one key=value per line in this order:
//   attack modality threshold n_natural n_attacked detected false_positives
//   indeterminate_natural indeterminate_attacked detection_rate
//   false_positive_rate natural_accuracy accuracy_before accuracy_after
//   natural_accuracy_after detected_correct_after detected_misclassified
//   restored restored_rate auc median_natural median_attacked
// followed by "sweep threshold=... detection_rate=... false_positive_rate=..."
// lines. Timing is kept in a separate record (FormatEvalTiming) so that the
// report itself is byte-stable under a fixed seed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfcheck/attacks.h"
#include "selfcheck/dataset.h"
#include "selfcheck/defense.h"
#include "selfcheck/model.h"
#include "selfcheck/profiles.h"

namespace selfcheck {

enum class AttackKind { kNone, kPatch, kFgsm, kBim };

AttackKind ParseAttackKind(const std::string& s);
const char* AttackKindName(AttackKind k);

struct AttackConfig {
  AttackKind kind = AttackKind::kPatch;
  PatchSpec patch;
  std::size_t patch_target = 0;   // optimized patches
  std::size_t patch_steps = 200;
  double patch_eta = 0.03;
  double epsilon = 0.005;         // audio, waveform units
  double step = 0.001;            // BIM step
  std::size_t iterations = 10;    // BIM
  std::optional<std::size_t> target;
  std::uint64_t seed = 1;

  void Validate() const;
};

// Attacked copy of `natural`, labels preserved. Optimized patches are fitted
// on `pool` (inputs whose label equals the target are skipped); an empty pool
// falls back to `natural`. The fitted patch is stored in `patch_out`.
LabeledSet MakeAttackedSet(const Model& model, const LabeledSet& natural,
                           const AttackConfig& attack, const MfccConfig& mfcc = {},
                           const LabeledSet& pool = {}, Tensor* patch_out = nullptr);

struct EvalRecord {
  bool attacked = false;
  std::size_t index = 0;
  std::size_t label = 0;
  std::size_t predicted = 0;
  double inconsistency = 0.0;  // NaN when indeterminate
  Verdict verdict = Verdict::kNatural;
  std::size_t final_label = 0;
  bool recovery_ran = false;
  std::string note;
  double elapsed_ms = 0.0;
};

struct SweepPoint {
  double threshold = 0.0;
  double detection_rate = 0.0;
  double false_positive_rate = 0.0;
};

struct EvalReport {
  std::string attack;
  Modality modality = Modality::kImage;
  double threshold = 0.0;
  std::size_t n_natural = 0;
  std::size_t n_attacked = 0;
  std::size_t detected = 0;
  std::size_t false_positives = 0;
  std::size_t indeterminate_natural = 0;
  std::size_t indeterminate_attacked = 0;
  double detection_rate = 0.0;
  double false_positive_rate = 0.0;
  double natural_accuracy = 0.0;        // plain prediction on naturals
  double accuracy_before = 0.0;         // plain prediction on attacked
  double accuracy_after = 0.0;          // defended final label on attacked
  double natural_accuracy_after = 0.0;  // defended final label on naturals
  double detected_correct_after = 0.0;  // among detected attacked inputs
  std::size_t detected_misclassified = 0;
  std::size_t restored = 0;             // of those, final label correct
  double restored_rate = 0.0;
  double auc = 0.0;
  double median_natural = 0.0;
  double median_attacked = 0.0;
  std::vector<SweepPoint> sweep;
  double mean_ms = 0.0;
  std::vector<EvalRecord> records;
};

// Defends every input of both sets and aggregates. Indeterminate inputs count
// as not flagged and rank below every score for the AUC. Throws
// InvalidArgument on an empty set or mismatched labels.
EvalReport EvaluateSets(const Model& model, const ProfileStore& store, const LabeledSet& natural,
                        const LabeledSet& attacked, const DefenseConfig& defense,
                        const std::string& attack_name = "none", std::size_t workers = 1);

// MakeAttackedSet followed by EvaluateSets.
EvalReport Evaluate(const Model& model, const ProfileStore& store, const LabeledSet& natural,
                    const AttackConfig& attack, const DefenseConfig& defense,
                    const LabeledSet& pool = {}, std::size_t workers = 1);

// Mann-Whitney estimate of P(attacked score > natural score), ties 1/2.
// NaN scores rank lowest.
double RocAuc(const std::vector<double>& natural, const std::vector<double>& attacked);

// Detection and false-positive rates at every distinct score, ascending.
std::vector<SweepPoint> ThresholdSweep(const std::vector<double>& natural,
                                       const std::vector<double>& attacked);

// Threshold maximizing detection_rate - false_positive_rate, placed midway
// between adjacent distinct scores. Ties go to the larger threshold.
double CalibrateThreshold(const std::vector<double>& natural,
                          const std::vector<double>& attacked);

std::vector<double> Scores(const EvalReport& report, bool attacked);

std::string FormatEvalReport(const EvalReport& r);
std::string FormatEvalRecords(const EvalReport& r);
std::string FormatEvalTiming(const EvalReport& r);

}  // namespace selfcheck
