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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/fdd.hpp"
#include "hydrotwin/keyvalue.hpp"
#include "hydrotwin/metrics.hpp"
#include "hydrotwin/random.hpp"

namespace hydrotwin {

/// Measurement noise scale per channel: 1 bar for pressures, the nominal
/// rated flow for the flow meter.
inline constexpr std::array<double, 5> kNoiseChannelScale = {1.0, 1.0, 1.0, 1.0, 15.3};

/// Stand-in for the physical loop: the same solver with hidden parameters
/// plus optional Gaussian sensor noise.
class PhysicalTwin {
 public:
  PhysicalTwin(ComponentVector theta, LoopConfig cfg, double noise_percent, std::uint64_t seed);

  const ComponentVector& theta() const { return theta_; }
  ComponentVector& theta() { return theta_; }
  double noise_percent() const { return noise_percent_; }

 private:
  friend ProcessVector step_physical_twin(PhysicalTwin& twin, const ControlVector& u);

  ComponentVector theta_;
  LoopConfig cfg_;
  double noise_percent_;
  Rng rng_;
};

/// simulate(u, hidden theta) plus N(0, (noise%/100 * channel scale)^2) per
/// channel. Throws NoConvergence from the solver.
ProcessVector step_physical_twin(PhysicalTwin& twin, const ControlVector& u);

struct ControlSetpoint {
  int step = 0;
  ControlVector u;
};

enum class EventKind { kFault, kReset };

struct FaultEvent {
  int step = 0;
  EventKind kind = EventKind::kFault;
  Parameter parameter = Parameter::kLoss1;
  double new_value = 0.0;  // native units; unused for resets
};

struct ScenarioSpec {
  std::vector<ControlSetpoint> controls;  // held until the next setpoint
  std::vector<FaultEvent> events;         // faults and resets, by step
  double noise_percent = 0.0;
  std::uint64_t seed = 0;
  int steps = 0;
  /// Steps after which an unresolved event no longer blocks the next one.
  int event_timeout = 10;

  /// Throws InvalidInput: needs a setpoint at step 0, strictly increasing
  /// setpoint steps, event steps within [0, steps), noise >= 0.
  void validate() const;

  /// Keys: steps, noise_percent, seed, event_timeout, repeated
  /// `control = step,u1,u2`, `event = step,index,value` (value `x<m>` is a
  /// multiplier of the nominal value) and `reset = step`, which returns both
  /// the physical loop and the twin model to nominal.
  static ScenarioSpec from_keyvalue(const KeyValueFile& file, const ComponentVector& nominal);
  std::string to_text() const;
};

/// Random setpoint every step, uniform in the given box, no events.
ScenarioSpec random_control_timeline(int steps, double noise_percent, std::uint64_t seed,
                                     double u1_min, double u1_max, double u2_min,
                                     double u2_max);

struct StepRecord {
  int step = 0;
  ControlVector u;
  ProcessVector measured;
  ProcessVector model;  // twin prediction before this step's FDD pass
  FddReport report;
  ComponentVector theta_physical;
  ComponentVector theta_model;  // after this step's FDD pass
  int active_event = -1;        // index into ScenarioSpec::events
};

/// One relative-error sample: |estimate - truth| / truth.
struct EstimationSample {
  int fault_class = 0;
  int perturbed_index = 0;
  double truth = 0.0;
  double estimate = 0.0;
  double relative_error = 0.0;
};

struct CampaignMetrics {
  ConfusionMatrix confusion;
  std::vector<EstimationSample> estimation;
  std::vector<int> detection_latency;  // steps, one per detected fault
  std::size_t events = 0;
  std::size_t triggered = 0;
  std::size_t converged = 0;
  std::size_t false_triggers = 0;  // triggers with no active event
  std::size_t steps = 0;

  double convergence_rate() const;
  /// Error statistics for one fault class.
  ErrorStats class_errors(int fault_class) const;
  /// Confusion and accuracy matrices, error quantiles and counters.
  std::string to_text() const;
};

struct ScenarioResult {
  std::vector<StepRecord> steps;
  CampaignMetrics metrics;

  /// Per-step table for plotting.
  std::string trace_csv() const;
};

/// Steps the physical twin through the timeline and runs one FDD pass per
/// step. A new event while the previous one is neither resolved (a
/// converged report) nor expired throws ScheduleViolation.
ScenarioResult run_scenario(const ScenarioSpec& spec, TwinState& twin, const FddModels& models);

/// Localization accuracy over held-out records, features against the
/// nominal loop. Throws EmptyTestSet.
CampaignMetrics evaluate_localization(const DecisionTree& classifier,
                                      std::span<const SampleRecord> test,
                                      const ComponentVector& nominal, const LoopConfig& cfg);

struct EstimationReport {
  std::vector<EstimationSample> samples;  // correctly localized records only
  std::size_t misclassified = 0;
  std::size_t without_target = 0;

  ErrorStats class_errors(int fault_class) const;
  ErrorStats parameter_errors(int perturbed_index) const;
  /// class,perturbed_index,truth,estimate,relative_error
  std::string to_csv() const;
  /// Per-class and per-parameter count, median, p90, max.
  std::string summary_csv() const;
};

/// Single-shot estimator error on records the classifier localizes
/// correctly. Throws EmptyTestSet.
EstimationReport evaluate_estimation(const EstimatorSet& estimators,
                                     const DecisionTree& classifier,
                                     std::span<const SampleRecord> test,
                                     const ComponentVector& nominal, const LoopConfig& cfg);

/// Independent single-fault injections, each from a fresh copy of the twin.
struct CampaignSpec {
  std::size_t events = 50;
  std::uint64_t seed = 1;
  double min_deviation = 0.1;  // |multiplier - 1| range
  double max_deviation = 0.5;
  double u1_min = 55.0;
  double u1_max = 90.0;
  double u2_min = 15.0;
  double u2_max = 60.0;
  double noise_percent = 0.0;
};

struct CampaignEvent {
  ControlVector u;
  Parameter parameter = Parameter::kLoss1;
  double multiplier = 1.0;
  std::optional<double> committed_truth;
  FddReport report;
  double relative_error = 0.0;  // of the committed value, when converged
};

struct CampaignResult {
  std::vector<CampaignEvent> events;
  CampaignMetrics metrics;

  /// One row per event.
  std::string to_csv() const;
};

CampaignResult run_campaign(const CampaignSpec& spec, const TwinState& twin,
                            const FddModels& models);

}  // namespace hydrotwin
