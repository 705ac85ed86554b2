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
#include "hydrotwin/errors.hpp"
#include "hydrotwin/metrics.hpp"
#include "hydrotwin/random.hpp"

using namespace hydrotwin;

TEST_CASE("class names") {
  CHECK(fault_class_name(1) == "theta1");
  CHECK(fault_class_name(4) == "theta4");
  CHECK(fault_class_name(5) == "theta5&6");
  CHECK_THROWS_AS(fault_class_name(0), InvalidInput);
}

TEST_CASE("confusion orientation") {
  ConfusionMatrix m;
  m.add(2, 1);  // classified 2, truly 1
  m.add(1, 1);
  m.add(1, 1);
  m.add(5, 5);
  CHECK(m.at(2, 1) == 1);
  CHECK(m.at(1, 2) == 0);
  CHECK(m.truth_total(1) == 3);
  CHECK(m.total() == 4);
  CHECK(m.overall_accuracy() == doctest::Approx(0.75));
  CHECK(m.class_accuracy_percent(1) == doctest::Approx(200.0 / 3.0));
  CHECK(m.class_accuracy_percent(3) == 0.0);
  CHECK(m.counts_csv().rfind("classification,theta1,theta2,theta3,theta4,theta5&6\n", 0) == 0);
  CHECK(m.counts_csv().find("theta2,1,0,0,0,0\n") != std::string::npos);
  CHECK_THROWS_AS(m.add(6, 1), InvalidInput);
}

TEST_CASE("percent matrix reconstructs from counts") {
  Rng rng(2);
  ConfusionMatrix::Counts counts{};
  for (auto& row : counts) {
    for (auto& c : row) c = rng.below(500);
  }
  const ConfusionMatrix m(counts);
  const auto pct = m.column_percent();
  for (int t = 1; t <= 5; ++t) {
    double sum = 0.0;
    for (int p = 1; p <= 5; ++p) {
      sum += pct[p - 1][t - 1];
      CHECK(pct[p - 1][t - 1] == doctest::Approx(100.0 * m.at(p, t) / m.truth_total(t)));
    }
    CHECK(sum == doctest::Approx(100.0));
  }
  // Printed percentages sum to 100 within rounding.
  const auto text = m.percent_csv();
  CHECK(text.find("classification") == 0);
}

TEST_CASE("quantiles") {
  CHECK(quantile({}, 0.5) == 0.0);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({0.0, 10.0}, 0.9) == doctest::Approx(9.0));
  std::vector<double> v{5, 1, 4, 2, 3};
  const auto s = summarize_errors(v);
  CHECK(s.count == 5);
  CHECK(s.median == 3.0);
  CHECK(s.p90 == doctest::Approx(4.6));
  CHECK(s.max == 5.0);
}

TEST_CASE("formatted tables") {
  ConfusionMatrix m;
  m.add(4, 4);
  const auto counts = m.format_counts();
  CHECK(counts.find("class\\truth") != std::string::npos);
  CHECK(m.format_percent().find("100.00%") != std::string::npos);
}
