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

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/fdd.hpp"
#include "hydrotwin/training.hpp"

namespace fixture {

/// Reduced operating grid; trains in a few seconds.
inline hydrotwin::SamplingPlan compact_plan() {
  hydrotwin::SamplingPlan plan;
  plan.u1_grid = {40, 50, 60, 70, 80, 90};
  plan.u2_grid = {10, 25, 40, 55, 70, 100};
  plan.multipliers.fill({0.5, 0.65, 0.8, 0.9, 1.1, 1.2, 1.35, 1.5});
  return plan;
}

inline const std::vector<hydrotwin::SampleRecord>& compact_records() {
  static const auto records =
      hydrotwin::generate(compact_plan(), hydrotwin::ComponentVector{}, hydrotwin::LoopConfig{})
          .records;
  return records;
}

/// Models trained once per test binary on every compact record.
inline const hydrotwin::FddModels& compact_models() {
  static const auto models = hydrotwin::train_models(
      compact_records(), hydrotwin::ComponentVector{}, hydrotwin::LoopConfig{});
  return models;
}

}  // namespace fixture
