// Copyright 2026 The hydrotwin Authors
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

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hydrotwin/decision_tree.hpp"
#include "hydrotwin/features.hpp"
#include "hydrotwin/hydronet.hpp"
#include "hydrotwin/keyvalue.hpp"
#include "hydrotwin/svr.hpp"

namespace hydrotwin {

/// Componentwise residual limits in process-vector order
/// (p1..p4 in bar, fl in m3/h).
struct ThresholdVector {
  std::array<double, 5> values{};

  static ThresholdVector detection_default() { return {{0.02, 0.02, 0.02, 0.02, 1.0}}; }
  static ThresholdVector validation_default() { return {{0.01, 0.01, 0.01, 0.01, 1.0}}; }

  /// Throws InvalidInput on negative or non-finite entries.
  void validate() const;
  /// `key = a,b,c,d,e`; returns `fallback` when the key is absent.
  static ThresholdVector from_keyvalue(const KeyValueFile& file, std::string_view key,
                                       ThresholdVector fallback);

  friend bool operator==(const ThresholdVector&, const ThresholdVector&) = default;
};

/// |y_s - y_m| per channel.
struct ResidualVector {
  std::array<double, 5> values{};

  static ResidualVector between(const ProcessVector& a, const ProcessVector& b);
  /// Largest residual-to-threshold ratio.
  double worst_ratio(const ThresholdVector& limits) const;
  /// True iff every residual is strictly below its limit.
  bool all_below(const ThresholdVector& limits) const;
};

struct DetectionResult {
  bool triggered = false;
  ResidualVector residuals;
};

/// Triggers when some residual strictly exceeds its threshold; a residual
/// equal to the threshold does not trigger.
DetectionResult detect(const ProcessVector& measured, const ProcessVector& model,
                       const ThresholdVector& limits);

/// Fault class predicted for a measurement, given the twin model's output at
/// the same setpoints.
int localize(const DecisionTree& classifier, const ControlVector& u,
             const ProcessVector& measured, const ProcessVector& model);

/// One regressor per fault class.
class EstimatorSet {
 public:
  void set(int fault_class, SvrModel model);
  bool contains(int fault_class) const { return models_.contains(fault_class); }
  /// Throws MissingEstimator.
  const SvrModel& at(int fault_class) const;
  const std::map<int, SvrModel>& models() const { return models_; }

 private:
  std::map<int, SvrModel> models_;
};

struct EstimateResult {
  double value = 0.0;
  bool clamped = false;
};

/// Estimated native-unit value of the parameter committed for `fault_class`.
/// Values below 1e-6 of the nominal value are raised to that floor.
EstimateResult estimate(const EstimatorSet& estimators, const FeatureVector& features,
                        int fault_class, const ComponentVector& nominal);
EstimateResult estimate(const EstimatorSet& estimators, const ControlVector& u,
                        const ProcessVector& measured, const ProcessVector& model,
                        int fault_class, const ComponentVector& nominal);

struct ValidationResult {
  bool passed = false;
  bool solver_failed = false;
  ResidualVector residuals;
  ProcessVector simulated;
};

/// Simulates the candidate at `u` and accepts it iff every residual against
/// the measurement is strictly below `limits`. A solver failure is reported
/// as a failed validation with solver_failed set.
ValidationResult validate(const ProcessVector& measured, const ComponentVector& candidate,
                          const ControlVector& u, const LoopConfig& cfg,
                          const ThresholdVector& limits);

struct FddModels {
  DecisionTree classifier;
  EstimatorSet estimators;
};

/// Mutable side of the twin. run_fdd writes theta_model; callers serialize
/// access per instance.
struct TwinState {
  ComponentVector theta_model;
  ComponentVector theta_nominal;
  LoopConfig cfg;
  ThresholdVector detection = ThresholdVector::detection_default();
  ThresholdVector validation = ThresholdVector::validation_default();
  int max_iterations = 3;

  /// Throws InvalidInput on invalid fields or when a validation limit
  /// exceeds the matching detection limit.
  void validate() const;

  /// Keys: the LoopConfig keys, `nominal.<param>`, `model.<param>`,
  /// `detect`, `validate`, `max_iterations`.
  static TwinState from_keyvalue(const KeyValueFile& file);
  std::string to_text() const;
};

enum class FddOutcome { kNoFault, kConverged, kFailedToConverge };
std::string_view outcome_name(FddOutcome outcome);

enum class FddAction { kLocalize, kRefine, kRelocalize };
std::string_view action_name(FddAction action);

struct FddIteration {
  FddAction action = FddAction::kLocalize;
  int fault_class = 0;
  double estimate = 0.0;
  bool clamped = false;
  bool solver_failed = false;
  bool passed = false;
  ResidualVector residuals;       // measurement vs model before the update
  ResidualVector post_residuals;  // measurement vs candidate
};

struct FddReport {
  bool triggered = false;
  ResidualVector detection_residuals;
  std::vector<FddIteration> trace;
  int iterations = 0;
  FddOutcome outcome = FddOutcome::kNoFault;
  bool model_solver_failed = false;
  int accepted_class = 0;  // 0 unless Converged
  double accepted_value = 0.0;
  ComponentVector final_theta;

  /// `key = value` lines, one per field and trace entry.
  std::string to_text() const;
};

/// One pass of the supervision loop: detect against the twin's model, then
/// up to max_iterations rounds of localize/estimate/validate.
///
/// Round 1 uses the classifier's label and the class estimator. Later rounds
/// refine the estimate by the estimator's own error at the last candidate,
/// value += g(y_s) - g(y_candidate), when the last candidate brought the
/// residual below the detection residual; otherwise they move to the next
/// class in the leaf's ranking. theta_model changes only on convergence.
FddReport run_fdd(const ProcessVector& measured, const ControlVector& u, TwinState& twin,
                  const FddModels& models);

/// Loads `tree.model` and `svr_<class>.model` files from a directory.
FddModels load_models(const std::filesystem::path& dir);
void save_models(const FddModels& models, const std::filesystem::path& dir);

}  // namespace hydrotwin
