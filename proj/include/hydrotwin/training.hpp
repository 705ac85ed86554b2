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
#include <optional>
#include <span>

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/decision_tree.hpp"
#include "hydrotwin/fdd.hpp"
#include "hydrotwin/svr.hpp"

namespace hydrotwin {

/// Records whose pump-equivalent rated head is above this multiple of the
/// nominal head are left out of the class-5 regressor's training set.
inline constexpr double kMaxEquivalentHeadRatio = 4.0;

/// Value the twin must commit to reproduce a single-parameter deviation
/// `truth` of `base`. Equal to truth[perturbed] except for the rated flow,
/// which the twin cannot commit; that maps to the equivalent rated head at
/// the operating point `u`. Empty when no positive head exists.
std::optional<double> committed_truth(const ControlVector& u, const ComponentVector& truth,
                                      Parameter perturbed, const ComponentVector& base,
                                      const LoopConfig& cfg);

/// Regression target of a record for its class estimator, in the units of
/// committed_parameter(fault_class).
///
/// Rated-flow records map to the rated head that reproduces the same
/// operating point with the rated flow left nominal; empty when no
/// admissible head does.
std::optional<double> estimation_target(const SampleRecord& record,
                                        const ComponentVector& nominal,
                                        const LoopConfig& cfg);

struct TrainingOptions {
  TreeParams tree;
  SvrParams svr;
};

struct TrainingSummary {
  std::size_t classifier_rows = 0;
  std::array<std::size_t, kNumFaultClasses> estimator_rows{};
  std::array<std::size_t, kNumFaultClasses> excluded_rows{};
  std::array<bool, kNumFaultClasses> estimator_converged{};
};

/// Fits the classifier on every record and one estimator per class present.
/// Features are taken against the nominal loop. The five estimators train
/// on separate threads.
FddModels train_models(std::span<const SampleRecord> train, const ComponentVector& nominal,
                       const LoopConfig& cfg, const TrainingOptions& options = {},
                       TrainingSummary* summary = nullptr);

}  // namespace hydrotwin
