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

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hydrotwin/errors.hpp"
#include "hydrotwin/scenario.hpp"

using namespace hydrotwin;

namespace {

ScenarioSpec constant_control(int steps, ControlVector u) {
  ScenarioSpec spec;
  spec.steps = steps;
  spec.controls = {{0, u}};
  return spec;
}

FaultEvent fault(int step, Parameter p, double value) {
  FaultEvent e;
  e.step = step;
  e.parameter = p;
  e.new_value = value;
  return e;
}

}  // namespace

TEST_CASE("physical twin noise") {
  const ControlVector u{70, 40};
  PhysicalTwin quiet(ComponentVector{}, LoopConfig{}, 0.0, 1);
  CHECK(step_physical_twin(quiet, u) == simulate(u, ComponentVector{}, LoopConfig{}));

  PhysicalTwin noisy(ComponentVector{}, LoopConfig{}, 1.0, 42);
  const auto clean = simulate(u, ComponentVector{}, LoopConfig{});
  std::array<double, 5> sum{}, sum_sq{};
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const auto y = step_physical_twin(noisy, u).to_array();
    const auto c = clean.to_array();
    for (std::size_t k = 0; k < 5; ++k) {
      sum[k] += y[k] - c[k];
      sum_sq[k] += (y[k] - c[k]) * (y[k] - c[k]);
    }
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const double mean = sum[k] / kDraws;
    const double sd = std::sqrt(sum_sq[k] / kDraws - mean * mean);
    CHECK(std::abs(sd - 0.01 * kNoiseChannelScale[k]) < 0.05 * 0.01 * kNoiseChannelScale[k]);
  }

  PhysicalTwin a(ComponentVector{}, LoopConfig{}, 0.5, 9), b(ComponentVector{}, LoopConfig{}, 0.5, 9);
  for (int i = 0; i < 20; ++i) CHECK(step_physical_twin(a, u) == step_physical_twin(b, u));
  CHECK_THROWS_AS(PhysicalTwin(ComponentVector{}, LoopConfig{}, -1.0, 1), InvalidInput);
}

TEST_CASE("quiet timeline never triggers") {
  const auto& models = fixture::compact_models();
  TwinState twin;
  const auto result = run_scenario(random_control_timeline(200, 0.0, 5, 0, 100, 0, 100), twin, models);
  CHECK(result.steps.size() == 200);
  for (const auto& s : result.steps) CHECK(s.report.outcome == FddOutcome::kNoFault);
  CHECK(result.metrics.false_triggers == 0);
}

TEST_CASE("noise-free fidelity off nominal") {
  // Any theta shared by loop and twin gives zero residuals.
  const auto& models = fixture::compact_models();
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    TwinState twin;
    for (const auto p : kAllParameters) twin.theta_model[p] *= rng.uniform(0.6, 1.4);
    const auto result =
        run_scenario(random_control_timeline(100, 0.0, 10 + trial, 0, 100, 0, 100), twin, models);
    CHECK(result.metrics.false_triggers == 0);
    for (const auto& s : result.steps) CHECK_FALSE(s.report.triggered);
  }
}

TEST_CASE("exchanger fault is detected, localized and estimated") {
  const auto& models = fixture::compact_models();
  TwinState twin;
  auto spec = constant_control(12, {70, 40});
  spec.events = {fault(5, Parameter::kLossx, 1.4 * 10.35)};
  const auto result = run_scenario(spec, twin, models);
  for (int t = 0; t < 5; ++t) CHECK_FALSE(result.steps[t].report.triggered);
  const auto& hit = result.steps[5].report;
  CHECK(hit.triggered);
  REQUIRE(hit.outcome == FddOutcome::kConverged);
  CHECK(hit.accepted_class == 3);
  for (int t = 5; t < 12; ++t) {
    CHECK(std::abs(result.steps[t].theta_model.lossx - 14.49) / 14.49 < 0.05);
  }
  const auto& m = result.metrics;
  CHECK(m.events == 1);
  CHECK(m.triggered == 1);
  CHECK(m.converged == 1);
  CHECK(m.detection_latency == std::vector<int>{0});
  CHECK(m.confusion.at(3, 3) == 1);
  REQUIRE(m.estimation.size() == 1);
  CHECK(m.estimation[0].relative_error < 0.05);
  CHECK(m.converged <= m.events);
}

TEST_CASE("overlapping events") {
  const auto& models = fixture::compact_models();
  auto spec = constant_control(20, {70, 40});
  // Sub-threshold fault: never detected, so never resolved.
  spec.events = {fault(2, Parameter::kLoss1, 4.5 * 1.0001), fault(4, Parameter::kLossx, 14.0)};
  TwinState twin;
  CHECK_THROWS_AS(run_scenario(spec, twin, models), ScheduleViolation);
  // Once the first event expires the second may start.
  spec.events[1].step = 12;
  TwinState fresh;
  const auto result = run_scenario(spec, fresh, models);
  CHECK(result.metrics.events == 2);
  CHECK(result.metrics.converged == 1);
}

TEST_CASE("reset returns loop and twin to nominal") {
  const auto& models = fixture::compact_models();
  auto spec = constant_control(10, {70, 40});
  spec.events = {fault(2, Parameter::kLoss3, 1.6)};
  FaultEvent reset;
  reset.kind = EventKind::kReset;
  reset.step = 6;
  spec.events.push_back(reset);
  TwinState twin;
  const auto result = run_scenario(spec, twin, models);
  CHECK(result.steps[5].theta_model.loss3 != 1.17);
  CHECK(result.steps[6].theta_physical == ComponentVector{});
  CHECK(result.steps[6].theta_model == ComponentVector{});
  for (int t = 6; t < 10; ++t) CHECK_FALSE(result.steps[t].report.triggered);
}

TEST_CASE("seeded replay") {
  const auto& models = fixture::compact_models();
  auto spec = random_control_timeline(60, 0.3, 77, 40, 90, 20, 80);
  spec.events = {fault(10, Parameter::kLoss1, 6.0)};
  TwinState a, b;
  CHECK(run_scenario(spec, a, models).trace_csv() == run_scenario(spec, b, models).trace_csv());
}

TEST_CASE("scenario file") {
  const ComponentVector nominal;
  const auto spec = ScenarioSpec::from_keyvalue(
      KeyValueFile::parse("steps = 30\nnoise_percent = 0.5\nseed = 4\n"
                          "control = 0,60,50\ncontrol = 10,70,40\n"
                          "event = 5,3,x1.4\nreset = 12\nevent = 20,4,3.3\n"),
      nominal);
  CHECK(spec.steps == 30);
  CHECK(spec.noise_percent == 0.5);
  CHECK(spec.seed == 4);
  REQUIRE(spec.controls.size() == 2);
  CHECK(spec.controls[1].u == ControlVector{70, 40});
  REQUIRE(spec.events.size() == 3);
  CHECK(spec.events[0].parameter == Parameter::kLossx);
  CHECK(spec.events[0].new_value == doctest::Approx(14.49));
  CHECK(spec.events[1].kind == EventKind::kReset);
  CHECK(spec.events[2].new_value == 3.3);

  const auto back = ScenarioSpec::from_keyvalue(KeyValueFile::parse(spec.to_text()), nominal);
  CHECK(back.to_text() == spec.to_text());

  const auto parse = [&](const char* text) {
    return ScenarioSpec::from_keyvalue(KeyValueFile::parse(text), nominal);
  };
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 1,50,50\n"), InvalidInput);
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 0,50,50\nevent = 10,1,5\n"), InvalidInput);
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 0,50,50\nevent = 3,7,5\n"), ParseError);
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 0,50\n"), ParseError);
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 0,50,50\nnoise_percent = -1\n"), InvalidInput);
  CHECK_THROWS_AS(parse("steps = 10\ncontrol = 0,50,50\ncontrol = 0,60,50\n"), InvalidInput);
}

TEST_CASE("localization evaluation") {
  const auto& models = fixture::compact_models();
  const auto& records = fixture::compact_records();
  const auto m = evaluate_localization(models.classifier, records, ComponentVector{}, LoopConfig{});
  CHECK(m.confusion.total() == records.size());
  for (int t = 1; t <= 5; ++t) {
    std::size_t n = 0;
    for (const auto& r : records) n += r.fault_class == t;
    CHECK(m.confusion.truth_total(t) == n);
  }
  CHECK(m.confusion.overall_accuracy() > 0.95);
  CHECK_THROWS_AS(evaluate_localization(models.classifier, {}, ComponentVector{}, LoopConfig{}),
                  EmptyTestSet);
}

TEST_CASE("estimation evaluation") {
  const auto& models = fixture::compact_models();
  const auto& records = fixture::compact_records();
  const auto rep = evaluate_estimation(models.estimators, models.classifier, records,
                                       ComponentVector{}, LoopConfig{});
  CHECK(rep.samples.size() + rep.misclassified + rep.without_target == records.size());
  for (const auto& s : rep.samples) {
    CHECK(s.relative_error == doctest::Approx(std::abs(s.estimate - s.truth) / s.truth));
  }
  CHECK(rep.to_csv().rfind("class,perturbed_index,truth,estimate,relative_error\n", 0) == 0);
  CHECK_THROWS_AS(evaluate_estimation(models.estimators, models.classifier, {}, ComponentVector{},
                                      LoopConfig{}),
                  EmptyTestSet);
}

TEST_CASE("exact estimator gives zero error") {
  // Constant targets make the regressor return the mean exactly.
  std::vector<SampleRecord> train;
  for (const auto& r : fixture::compact_records()) {
    if (r.fault_class == 1 && r.true_value == 0.8 * 4.5) train.push_back(r);
    if (r.fault_class == 2 && r.true_value == 0.8 * 1.17) train.push_back(r);
  }
  const auto features = record_features(train, ComponentVector{}, LoopConfig{});
  const auto tree = DecisionTree::fit(features, record_labels(train));
  EstimatorSet set;
  for (const int c : {1, 2}) {
    std::vector<FeatureVector> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train[i].fault_class != c) continue;
      x.push_back(features[i]);
      y.push_back(train[i].true_value);
    }
    set.set(c, SvrModel::fit(x, y));
  }
  const auto rep = evaluate_estimation(set, tree, train, ComponentVector{}, LoopConfig{});
  CHECK(rep.misclassified == 0);
  REQUIRE(rep.samples.size() == train.size());
  for (const auto& s : rep.samples) CHECK(s.relative_error < 1e-12);
}

TEST_CASE("campaign bookkeeping") {
  const auto& models = fixture::compact_models();
  CampaignSpec spec;
  spec.events = 12;
  spec.seed = 5;
  const auto a = run_campaign(spec, TwinState{}, models);
  CHECK(a.events.size() == 12);
  CHECK(a.metrics.events == 12);
  CHECK(a.metrics.converged <= a.metrics.events);
  for (const auto& e : a.events) {
    CHECK(std::abs(e.multiplier - 1.0) >= 0.1);
    CHECK(std::abs(e.multiplier - 1.0) <= 0.5);
    CHECK(e.report.triggered == (e.report.outcome != FddOutcome::kNoFault));
  }
  CHECK(run_campaign(spec, TwinState{}, models).to_csv() == a.to_csv());
  spec.min_deviation = 0.0;
  CHECK_THROWS_AS(run_campaign(spec, TwinState{}, models), InvalidInput);
}
