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
#include <span>
#include <vector>

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/hydronet.hpp"

namespace hydrotwin {

inline constexpr std::size_t kNumFeatures = 7;

/// Learner input: [u1, u2, dp1, dp2, dp3, dp4, dfl], where each d-entry is
/// the measured value minus the twin model's prediction at the same
/// setpoints. The order is part of the persisted-model contract.
using FeatureVector = std::array<double, kNumFeatures>;

FeatureVector make_features(const ControlVector& u, const ProcessVector& measured,
                            const ProcessVector& model);

/// Features of dataset records against the unperturbed loop.
std::vector<FeatureVector> record_features(std::span<const SampleRecord> records,
                                           const ComponentVector& nominal,
                                           const LoopConfig& cfg);

std::vector<int> record_labels(std::span<const SampleRecord> records);

}  // namespace hydrotwin
