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

#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "hydrotwin/errors.hpp"
#include "hydrotwin/fdd.hpp"

using namespace hydrotwin;

namespace {

ProcessVector offset(ProcessVector y, std::size_t channel, double delta) {
  auto a = y.to_array();
  a[channel] += delta;
  return ProcessVector::from_array(a);
}

}  // namespace

TEST_CASE("default thresholds") {
  CHECK(ThresholdVector::detection_default().values == std::array<double, 5>{0.02, 0.02, 0.02, 0.02, 1.0});
  CHECK(ThresholdVector::validation_default().values == std::array<double, 5>{0.01, 0.01, 0.01, 0.01, 1.0});
  TwinState twin;
  CHECK(twin.detection == ThresholdVector::detection_default());
  CHECK(twin.validation == ThresholdVector::validation_default());
  CHECK(twin.max_iterations == 3);
}

TEST_CASE("detection is a strict inequality") {
  const ProcessVector zero{};
  const auto lim = ThresholdVector::detection_default();
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(detect(offset(zero, k, 0.03), zero, lim).triggered);
    CHECK(detect(offset(zero, k, -0.03), zero, lim).triggered);
    CHECK_FALSE(detect(offset(zero, k, 0.02), zero, lim).triggered);
    CHECK_FALSE(detect(offset(zero, k, 0.0199), zero, lim).triggered);
  }
  CHECK_FALSE(detect(offset(zero, 4, 0.5), zero, lim).triggered);
  CHECK_FALSE(detect(offset(zero, 4, 1.0), zero, lim).triggered);
  CHECK(detect(offset(zero, 4, 1.01), zero, lim).triggered);
  const auto r = detect(offset(zero, 2, 0.05), zero, lim).residuals;
  CHECK(r.values[2] == 0.05);
  CHECK(r.worst_ratio(lim) == doctest::Approx(2.5));
  CHECK_FALSE(r.all_below(lim));
  CHECK(ResidualVector{}.all_below(lim));
  CHECK_FALSE(ResidualVector{{0.01, 0, 0, 0, 0}}.all_below(ThresholdVector::validation_default()));
}

TEST_CASE("threshold and twin validation") {
  CHECK_THROWS_AS((ThresholdVector{{-1, 0, 0, 0, 0}}.validate()), InvalidInput);
  TwinState twin;
  twin.validation.values[0] = 0.05;
  CHECK_THROWS_AS(twin.validate(), InvalidInput);
  twin = {};
  twin.max_iterations = 0;
  CHECK_THROWS_AS(twin.validate(), InvalidInput);
}

TEST_CASE("twin state text round trip") {
  TwinState twin;
  twin.theta_model.lossx = 14.0;
  twin.detection.values[4] = 2.0;
  twin.max_iterations = 5;
  const auto back = TwinState::from_keyvalue(KeyValueFile::parse(twin.to_text()));
  CHECK(back.theta_model == twin.theta_model);
  CHECK(back.theta_nominal == twin.theta_nominal);
  CHECK(back.cfg == twin.cfg);
  CHECK(back.detection == twin.detection);
  CHECK(back.validation == twin.validation);
  CHECK(back.max_iterations == 5);
}

TEST_CASE("no fault leaves the twin alone") {
  const auto& models = fixture::compact_models();
  TwinState twin;
  const ControlVector u{65, 45};
  const auto y = simulate(u, twin.theta_model, twin.cfg);
  const auto report = run_fdd(y, u, twin, models);
  CHECK_FALSE(report.triggered);
  CHECK(report.outcome == FddOutcome::kNoFault);
  CHECK(report.trace.empty());
  CHECK(twin.theta_model == ComponentVector{});
}

TEST_CASE("single fault converges") {
  const auto& models = fixture::compact_models();
  struct Case {
    Parameter p;
    double m;
  };
  for (const auto c : {Case{Parameter::kLossx, 1.4}, Case{Parameter::kLoss1, 0.7},
                       Case{Parameter::kTankPressure, 1.2}, Case{Parameter::kRatedHead, 0.8}}) {
    CAPTURE(parameter_name(c.p));
    TwinState twin;
    const ControlVector u{70, 40};
    const auto truth = twin.theta_model.with(c.p, twin.theta_model[c.p] * c.m);
    const auto y = simulate(u, truth, twin.cfg);
    const auto report = run_fdd(y, u, twin, models);
    CHECK(report.triggered);
    REQUIRE(report.outcome == FddOutcome::kConverged);
    CHECK(report.accepted_class == fault_class_of(c.p));
    CHECK(std::abs(report.accepted_value - truth[c.p]) / truth[c.p] < 0.05);
    CHECK(report.trace.back().post_residuals.all_below(twin.validation));
    CHECK(twin.theta_model == ComponentVector{}.with(c.p, report.accepted_value));
    CHECK(report.final_theta == twin.theta_model);
    // A second pass at the same point sees nothing.
    CHECK_FALSE(run_fdd(y, u, twin, models).triggered);
  }
}

TEST_CASE("unreachable validation keeps the model") {
  const auto& models = fixture::compact_models();
  TwinState twin;
  twin.validation = {{1e-12, 1e-12, 1e-12, 1e-12, 1e-12}};
  const ControlVector u{70, 40};
  const auto y = simulate(u, twin.theta_model.with(Parameter::kLossx, 14.0), twin.cfg);
  const auto report = run_fdd(y, u, twin, models);
  CHECK(report.triggered);
  CHECK(report.outcome == FddOutcome::kFailedToConverge);
  CHECK(report.iterations == 3);
  REQUIRE(report.trace.size() == 3);
  CHECK(report.trace[0].action == FddAction::kLocalize);
  CHECK(report.trace[1].action != FddAction::kLocalize);
  CHECK(report.accepted_class == 0);
  CHECK(twin.theta_model == ComponentVector{});
  const auto text = report.to_text();
  CHECK(text.find("outcome = failed_to_converge") != std::string::npos);
}

TEST_CASE("estimator set and clamping") {
  EstimatorSet set;
  CHECK_THROWS_AS(set.at(1), MissingEstimator);
  std::vector<FeatureVector> x{{0, 0, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 1, 1}};
  std::vector<double> y{-5.0, -5.0};
  set.set(1, SvrModel::fit(x, y));
  const auto r = estimate(set, FeatureVector{}, 1, ComponentVector{});
  CHECK(r.clamped);
  CHECK(r.value == doctest::Approx(4.5e-6));
  CHECK_THROWS_AS(estimate(set, FeatureVector{}, 2, ComponentVector{}), MissingEstimator);
}

TEST_CASE("candidate validation") {
  const TwinState twin;
  const ControlVector u{60, 60};
  const auto truth = twin.theta_model.with(Parameter::kLoss3, 1.5);
  const auto y = simulate(u, truth, twin.cfg);
  CHECK(validate(y, truth, u, twin.cfg, twin.validation).passed);
  const auto off = validate(y, twin.theta_model, u, twin.cfg, twin.validation);
  CHECK_FALSE(off.solver_failed);
  CHECK(off.simulated == simulate(u, twin.theta_model, twin.cfg));
}

TEST_CASE("model directory round trip") {
  const auto& models = fixture::compact_models();
  const auto dir = std::filesystem::temp_directory_path() / "hydrotwin_models_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  save_models(models, dir);
  const auto back = load_models(dir);
  CHECK(back.classifier.serialize() == models.classifier.serialize());
  for (int c = 1; c <= 5; ++c) {
    CHECK(back.estimators.at(c).serialize() == models.estimators.at(c).serialize());
  }
  std::filesystem::remove(dir / "tree.model");
  CHECK_THROWS_AS(load_models(dir), IoError);
  std::filesystem::remove_all(dir);
}
