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

#include <array>
#include <cmath>

#include "doctest.h"
#include "hydrotwin/errors.hpp"
#include "hydrotwin/hydronet.hpp"
#include "hydrotwin/random.hpp"
#include "oracles.hpp"

using namespace hydrotwin;

namespace {

oracle::Theta to_oracle(const ComponentVector& t) {
  return {t.loss1, t.loss3, t.lossx, t.p_tank, t.hmt, t.debit};
}

ComponentVector random_theta(Rng& rng) {
  ComponentVector t;
  for (const auto p : kAllParameters) t[p] *= rng.uniform(0.5, 1.5);
  return t;
}

}  // namespace

TEST_CASE("nominal component vector") {
  const ComponentVector t;
  CHECK(t.loss1 == 4.5);
  CHECK(t.loss3 == 1.17);
  CHECK(t.lossx == 10.35);
  CHECK(t.p_tank == 3.0);
  CHECK(t.hmt == 229.0);
  CHECK(t.debit == 15.3);
  CHECK(t[Parameter::kRatedFlow] == 15.3);
  CHECK(t.with(Parameter::kLossx, 12.0).lossx == 12.0);
}

TEST_CASE("parameter names and indices") {
  for (const auto p : kAllParameters) {
    CHECK(parameter_from_name(parameter_name(p)) == p);
    CHECK(parameter_from_index(to_index(p)) == p);
  }
  CHECK_FALSE(parameter_from_name("nope").has_value());
  CHECK_THROWS_AS(parameter_from_index(0), InvalidInput);
  CHECK_THROWS_AS(parameter_from_index(7), InvalidInput);
}

TEST_CASE("frozen primitives") {
  const LoopConfig cfg;
  CHECK(parallel_loss_coefficient(0.0, 10.35, cfg) == 10.35);
  CHECK(parallel_loss_coefficient(100.0, 10.35, cfg) == doctest::Approx(0.9650596861810676).epsilon(1e-14));
  CHECK(velocity_head(15.3, cfg) == doctest::Approx(3.8206658769595907).epsilon(1e-14));
  CHECK(head_to_bar(10.0, cfg) == doctest::Approx(0.981).epsilon(1e-15));
  // The rated point lies on the full-speed curve.
  CHECK(pump_head(15.3, 1.0, ComponentVector{}, cfg) == doctest::Approx(229.0).epsilon(1e-15));
}

TEST_CASE("frozen operating points") {
  struct Case {
    double u1, u2;
    std::array<double, 5> y;
  };
  // Values from an independent closed-form evaluation.
  const Case cases[] = {
      {54, 100, {5.208229890352436, 2.5668729052791033, 3.542356449118218, 3.185097049026025, 15.205550314018154}},
      {70, 40, {7.494860701865532, 2.328976025505853, 4.913999261503427, 3.2867623822624576, 18.926202606835716}},
      {100, 100, {10.572804836599573, 1.5146533102849908, 4.859932953080307, 3.6347635426132516, 28.158426507441025}},
      {25, 10, {3.743350965803667, 2.9267246673270746, 3.4615227632154926, 3.0313142447320187, 6.254223050459855}},
      {90, 0, {14.08250868676214, 2.1552745821816477, 10.83356477207617, 3.3609937682984388, 21.234999132972312}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.u1);
    CAPTURE(c.u2);
    const auto y = simulate({c.u1, c.u2}, ComponentVector{}, LoopConfig{}).to_array();
    for (std::size_t k = 0; k < 5; ++k) CHECK(y[k] == doctest::Approx(c.y[k]).epsilon(1e-12));
  }
}

TEST_CASE("stopped pump") {
  const auto y = simulate({0.0, 50.0}, ComponentVector{}, LoopConfig{});
  CHECK(y.fl == 0.0);
  CHECK(y.p1 == 3.0);
  CHECK(y.p2 == 3.0);
  CHECK(y.p3 == 3.0);
  CHECK(y.p4 == 3.0);
}

TEST_CASE("flow agrees with scan and closed-form oracles") {
  Rng rng(11);
  const LoopConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const ControlVector u{rng.uniform(1.0, 100.0), rng.uniform(0.0, 100.0)};
    const auto theta = random_theta(rng);
    const double q = solve_operating_point(u, theta, cfg);
    CHECK(std::abs(q - oracle::flow_scan(u.u1, u.u2, to_oracle(theta))) < 1e-6);
    CHECK(q == doctest::Approx(oracle::flow_closed_form(u.u1, u.u2, to_oracle(theta))).epsilon(1e-12));
  }
}

TEST_CASE("pressures agree with the oracle walk") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const ControlVector u{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    const auto theta = random_theta(rng);
    const auto y = simulate(u, theta, LoopConfig{}).to_array();
    const auto ref = oracle::pressures(u.u1, u.u2, to_oracle(theta));
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-10);
  }
}

TEST_CASE("loop pressure closure") {
  Rng rng(13);
  const LoopConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const ControlVector u{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    const auto theta = random_theta(rng);
    const auto y = simulate(u, theta, cfg);
    const double back_to_tank = y.p4 - head_to_bar(cfg.k_section2 * velocity_head(y.fl, cfg), cfg);
    CHECK(std::abs(back_to_tank - theta.p_tank) < 1e-9);
  }
}

TEST_CASE("tank pressure shifts every node and nothing else") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const ControlVector u{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    const double delta = rng.uniform(-1.5, 1.5);
    const ComponentVector base;
    const auto a = simulate(u, base, LoopConfig{});
    const auto b = simulate(u, base.with(Parameter::kTankPressure, base.p_tank + delta), LoopConfig{});
    CHECK(b.fl == a.fl);
    CHECK(std::abs((b.p1 - a.p1) - delta) < 1e-12);
    CHECK(std::abs((b.p2 - a.p2) - delta) < 1e-12);
    CHECK(std::abs((b.p3 - a.p3) - delta) < 1e-12);
    CHECK(std::abs((b.p4 - a.p4) - delta) < 1e-12);
  }
}

TEST_CASE("monotone responses") {
  const ComponentVector t;
  const LoopConfig cfg;
  double last = -1.0;
  for (double u1 = 10; u1 <= 100; u1 += 10) {
    const double q = solve_operating_point({u1, 50.0}, t, cfg);
    CHECK(q > last);
    last = q;
  }
  last = -1.0;
  for (double u2 = 0; u2 <= 100; u2 += 10) {
    const double q = solve_operating_point({60.0, u2}, t, cfg);
    CHECK(q > last);
    last = q;
  }
  CHECK(solve_operating_point({60, 50}, t.with(Parameter::kLoss1, 9.0), cfg) <
        solve_operating_point({60, 50}, t, cfg));
  CHECK(solve_operating_point({60, 50}, t.with(Parameter::kRatedHead, 300.0), cfg) >
        solve_operating_point({60, 50}, t, cfg));
}

TEST_CASE("equivalent rated head") {
  const ComponentVector t;
  const LoopConfig cfg;
  const ControlVector u{70, 40};
  const double q = solve_operating_point(u, t, cfg);
  CHECK(equivalent_rated_head(u, q, pump_head(q, 0.7, t, cfg), t.debit, cfg) ==
        doctest::Approx(t.hmt).epsilon(1e-14));
  // A lower rated flow moves the same operating point onto another head.
  const auto low = t.with(Parameter::kRatedFlow, 12.0);
  const double q2 = solve_operating_point(u, low, cfg);
  const double h2 = equivalent_rated_head(u, q2, pump_head(q2, 0.7, low, cfg), t.debit, cfg);
  const auto same = simulate(u, t.with(Parameter::kRatedHead, h2), cfg);
  CHECK(same.fl == doctest::Approx(q2).epsilon(1e-10));
  CHECK(std::isnan(equivalent_rated_head({10, 50}, 30.0, 5.0, 15.3, cfg)));
  CHECK(std::isnan(equivalent_rated_head(u, q, -1.0, 15.3, cfg)));
}

TEST_CASE("input validation") {
  const ComponentVector t;
  const LoopConfig cfg;
  CHECK_THROWS_AS(simulate({101.0, 50.0}, t, cfg), InvalidInput);
  CHECK_THROWS_AS(simulate({50.0, -1.0}, t, cfg), InvalidInput);
  CHECK_THROWS_AS(simulate({NAN, 50.0}, t, cfg), InvalidInput);
  CHECK_THROWS_AS(simulate({50.0, 50.0}, t.with(Parameter::kLoss3, 0.0), cfg), InvalidInput);
  LoopConfig bad;
  bad.pump_c2 = 0.3;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = {};
  bad.pipe_diameter = -1;
  CHECK_THROWS_AS(simulate({50, 50}, t, bad), InvalidInput);
}

TEST_CASE("config text round trip") {
  ComponentVector t;
  t.lossx = 0.1 + 0.2;
  const auto back = ComponentVector::from_keyvalue(KeyValueFile::parse(t.to_text()));
  CHECK(back == t);
  LoopConfig cfg;
  cfg.kv100 = 2.5;
  CHECK(LoopConfig::from_keyvalue(KeyValueFile::parse(cfg.to_text())) == cfg);
  const auto partial = ComponentVector::from_keyvalue(KeyValueFile::parse("hmt = 200\n"));
  CHECK(partial.hmt == 200.0);
  CHECK(partial.loss1 == 4.5);
  CHECK_THROWS_AS(ComponentVector::from_keyvalue(KeyValueFile::parse("p_tank = -1\n")), InvalidInput);
}
