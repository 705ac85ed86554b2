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

#include "hydrotwin/fdd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/errors.hpp"

namespace hydrotwin {
namespace {

constexpr double kClampFraction = 1e-6;

std::string join(const std::array<double, 5>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_exact(v[i]);
  }
  return out;
}

}  // namespace

void ThresholdVector::validate() const {
  for (const double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("thresholds must be finite and >= 0");
  }
}

ThresholdVector ThresholdVector::from_keyvalue(const KeyValueFile& file, std::string_view key,
                                               ThresholdVector fallback) {
  const auto* e = file.find(key);
  if (e == nullptr) return fallback;
  const auto v = parse_number_list(e->value, e->line);
  if (v.size() != 5) throw ParseError(std::string(key) + " needs 5 values", e->line);
  ThresholdVector t;
  std::copy(v.begin(), v.end(), t.values.begin());
  t.validate();
  return t;
}

ResidualVector ResidualVector::between(const ProcessVector& a, const ProcessVector& b) {
  const auto x = a.to_array();
  const auto y = b.to_array();
  ResidualVector r;
  for (std::size_t k = 0; k < 5; ++k) r.values[k] = std::abs(x[k] - y[k]);
  return r;
}

double ResidualVector::worst_ratio(const ThresholdVector& limits) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    const double lim = limits.values[k];
    const double ratio = lim > 0.0 ? values[k] / lim : (values[k] > 0.0 ? HUGE_VAL : 0.0);
    worst = std::max(worst, ratio);
  }
  return worst;
}

bool ResidualVector::all_below(const ThresholdVector& limits) const {
  for (std::size_t k = 0; k < 5; ++k) {
    if (!(values[k] < limits.values[k])) return false;
  }
  return true;
}

DetectionResult detect(const ProcessVector& measured, const ProcessVector& model,
                       const ThresholdVector& limits) {
  DetectionResult d;
  d.residuals = ResidualVector::between(measured, model);
  for (std::size_t k = 0; k < 5; ++k) {
    // NaN residuals count as a trigger.
    if (!(d.residuals.values[k] <= limits.values[k])) d.triggered = true;
  }
  return d;
}

int localize(const DecisionTree& classifier, const ControlVector& u,
             const ProcessVector& measured, const ProcessVector& model) {
  return classifier.predict(make_features(u, measured, model));
}

void EstimatorSet::set(int fault_class, SvrModel model) {
  committed_parameter(fault_class);  // range check
  models_.insert_or_assign(fault_class, std::move(model));
}

const SvrModel& EstimatorSet::at(int fault_class) const {
  const auto it = models_.find(fault_class);
  if (it == models_.end()) {
    throw MissingEstimator("no estimator for fault class " + std::to_string(fault_class));
  }
  return it->second;
}

EstimateResult estimate(const EstimatorSet& estimators, const FeatureVector& features,
                        int fault_class, const ComponentVector& nominal) {
  const double floor = kClampFraction * nominal[committed_parameter(fault_class)];
  EstimateResult r;
  r.value = estimators.at(fault_class).predict(features);
  if (!(r.value >= floor)) {
    r.value = floor;
    r.clamped = true;
  }
  return r;
}

EstimateResult estimate(const EstimatorSet& estimators, const ControlVector& u,
                        const ProcessVector& measured, const ProcessVector& model,
                        int fault_class, const ComponentVector& nominal) {
  return estimate(estimators, make_features(u, measured, model), fault_class, nominal);
}

ValidationResult validate(const ProcessVector& measured, const ComponentVector& candidate,
                          const ControlVector& u, const LoopConfig& cfg,
                          const ThresholdVector& limits) {
  ValidationResult v;
  try {
    v.simulated = simulate(u, candidate, cfg);
  } catch (const NoConvergence&) {
    v.solver_failed = true;
    v.residuals.values.fill(HUGE_VAL);
    return v;
  }
  v.residuals = ResidualVector::between(measured, v.simulated);
  v.passed = v.residuals.all_below(limits);
  return v;
}

void TwinState::validate() const {
  theta_model.validate();
  theta_nominal.validate();
  cfg.validate();
  detection.validate();
  validation.validate();
  if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
  for (std::size_t k = 0; k < 5; ++k) {
    if (validation.values[k] > detection.values[k]) {
      throw InvalidInput("validation threshold exceeds detection threshold");
    }
  }
}

TwinState TwinState::from_keyvalue(const KeyValueFile& file) {
  TwinState s;
  s.cfg = LoopConfig::from_keyvalue(file);
  for (const auto p : kAllParameters) {
    const std::string name(parameter_name(p));
    if (const auto v = file.number("nominal." + name)) s.theta_nominal[p] = *v;
  }
  s.theta_model = s.theta_nominal;
  for (const auto p : kAllParameters) {
    const std::string name(parameter_name(p));
    if (const auto v = file.number("model." + name)) s.theta_model[p] = *v;
  }
  s.detection = ThresholdVector::from_keyvalue(file, "detect", s.detection);
  s.validation = ThresholdVector::from_keyvalue(file, "validate", s.validation);
  if (const auto* e = file.find("max_iterations")) {
    const double v = parse_number(e->value, e->line);
    if (v < 1 || v != std::floor(v) || v > 1000) {
      throw ParseError("max_iterations must be an integer in 1..1000", e->line);
    }
    s.max_iterations = static_cast<int>(v);
  }
  s.validate();
  return s;
}

std::string TwinState::to_text() const {
  std::ostringstream out;
  out << "# loop\n" << cfg.to_text() << "# nominal component vector\n";
  for (const auto p : kAllParameters) {
    out << "nominal." << parameter_name(p) << " = " << format_exact(theta_nominal[p]) << '\n';
  }
  if (!(theta_model == theta_nominal)) {
    for (const auto p : kAllParameters) {
      out << "model." << parameter_name(p) << " = " << format_exact(theta_model[p]) << '\n';
    }
  }
  out << "# thresholds: p1, p2, p3, p4 (bar), fl (m3/h)\n"
      << "detect = " << join(detection.values) << '\n'
      << "validate = " << join(validation.values) << '\n'
      << "max_iterations = " << max_iterations << '\n';
  return out.str();
}

std::string_view outcome_name(FddOutcome outcome) {
  switch (outcome) {
    case FddOutcome::kNoFault: return "no_fault";
    case FddOutcome::kConverged: return "converged";
    case FddOutcome::kFailedToConverge: return "failed_to_converge";
  }
  return "?";
}

std::string_view action_name(FddAction action) {
  switch (action) {
    case FddAction::kLocalize: return "localize";
    case FddAction::kRefine: return "refine";
    case FddAction::kRelocalize: return "relocalize";
  }
  return "?";
}

std::string FddReport::to_text() const {
  std::ostringstream out;
  out << "triggered = " << (triggered ? 1 : 0) << '\n'
      << "outcome = " << outcome_name(outcome) << '\n'
      << "iterations = " << iterations << '\n'
      << "detection_residuals = " << join(detection_residuals.values) << '\n';
  if (model_solver_failed) out << "model_solver_failed = 1\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& it = trace[i];
    const std::string k = "iteration." + std::to_string(i + 1) + ".";
    out << k << "action = " << action_name(it.action) << '\n'
        << k << "class = " << it.fault_class << '\n'
        << k << "estimate = " << format_exact(it.estimate) << '\n'
        << k << "clamped = " << (it.clamped ? 1 : 0) << '\n'
        << k << "residuals = " << join(it.residuals.values) << '\n'
        << k << "post_residuals = " << join(it.post_residuals.values) << '\n'
        << k << "solver_failed = " << (it.solver_failed ? 1 : 0) << '\n'
        << k << "passed = " << (it.passed ? 1 : 0) << '\n';
  }
  if (outcome == FddOutcome::kConverged) {
    out << "accepted.class = " << accepted_class << '\n'
        << "accepted.parameter = " << parameter_name(committed_parameter(accepted_class)) << '\n'
        << "accepted.value = " << format_exact(accepted_value) << '\n';
  }
  for (const auto p : kAllParameters) {
    out << "final." << parameter_name(p) << " = " << format_exact(final_theta[p]) << '\n';
  }
  return out.str();
}

FddReport run_fdd(const ProcessVector& measured, const ControlVector& u, TwinState& twin,
                  const FddModels& models) {
  FddReport report;
  report.final_theta = twin.theta_model;

  ProcessVector model_out;
  try {
    model_out = simulate(u, twin.theta_model, twin.cfg);
  } catch (const NoConvergence&) {
    report.triggered = true;
    report.model_solver_failed = true;
    report.outcome = FddOutcome::kFailedToConverge;
    return report;
  }

  const auto detection = detect(measured, model_out, twin.detection);
  report.triggered = detection.triggered;
  report.detection_residuals = detection.residuals;
  if (!detection.triggered) return report;

  const auto features = make_features(u, measured, model_out);
  const auto ranking = models.classifier.ranked_classes(features);
  std::vector<int> tried;
  report.trace.reserve(static_cast<std::size_t>(twin.max_iterations));

  const double detection_score = detection.residuals.worst_ratio(twin.validation);
  int fault_class = 0;
  double value = 0.0;
  const FddIteration* last = nullptr;
  ProcessVector last_simulated;

  for (int round = 1; round <= twin.max_iterations; ++round) {
    FddIteration step;
    EstimateResult est;
    const bool improved = last != nullptr && !last->solver_failed &&
                          last->post_residuals.worst_ratio(twin.validation) < detection_score;
    const auto untried = std::find_if(ranking.begin(), ranking.end(), [&](int c) {
      return std::find(tried.begin(), tried.end(), c) == tried.end() &&
             models.estimators.contains(c);
    });

    if (last == nullptr || (!improved && untried != ranking.end())) {
      step.action = last == nullptr ? FddAction::kLocalize : FddAction::kRelocalize;
      fault_class = last == nullptr ? ranking.front() : *untried;
      tried.push_back(fault_class);
      est = estimate(models.estimators, features, fault_class, twin.theta_nominal);
    } else {
      step.action = FddAction::kRefine;
      const auto& g = models.estimators.at(fault_class);
      const double correction =
          g.predict(features) - g.predict(make_features(u, last_simulated, model_out));
      const double floor = 1e-6 * twin.theta_nominal[committed_parameter(fault_class)];
      est.value = value + correction;
      if (!(est.value >= floor)) {
        est.value = floor;
        est.clamped = true;
      }
    }
    value = est.value;

    const auto candidate = twin.theta_model.with(committed_parameter(fault_class), value);
    const auto check = validate(measured, candidate, u, twin.cfg, twin.validation);

    step.fault_class = fault_class;
    step.estimate = value;
    step.clamped = est.clamped;
    step.solver_failed = check.solver_failed;
    step.passed = check.passed;
    step.residuals = detection.residuals;
    step.post_residuals = check.residuals;
    report.trace.push_back(step);
    report.iterations = static_cast<int>(report.trace.size());
    last = &report.trace.back();
    last_simulated = check.simulated;

    if (check.passed) {
      twin.theta_model = candidate;
      report.outcome = FddOutcome::kConverged;
      report.accepted_class = fault_class;
      report.accepted_value = value;
      report.final_theta = candidate;
      return report;
    }
  }

  report.outcome = FddOutcome::kFailedToConverge;
  return report;
}

FddModels load_models(const std::filesystem::path& dir) {
  FddModels m{load_tree(dir / "tree.model"), {}};
  for (int c = 1; c <= kNumFaultClasses; ++c) {
    const auto path = dir / ("svr_" + std::to_string(c) + ".model");
    if (std::filesystem::exists(path)) m.estimators.set(c, load_svr(path));
  }
  return m;
}

void save_models(const FddModels& models, const std::filesystem::path& dir) {
  save_model(models.classifier, dir / "tree.model");
  for (const auto& [c, svr] : models.estimators.models()) {
    save_model(svr, dir / ("svr_" + std::to_string(c) + ".model"));
  }
}

}  // namespace hydrotwin
