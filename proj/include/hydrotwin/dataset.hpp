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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrotwin/hydronet.hpp"
#include "hydrotwin/keyvalue.hpp"

namespace hydrotwin {

/// Localization labels: 1..4 map one-to-one onto parameters 1..4; the two
/// pump parameters share label 5 because their effects cannot be told apart
/// from one operating point.
inline constexpr int kNumFaultClasses = 5;

constexpr int fault_class_of(Parameter p) { return to_index(p) < 5 ? to_index(p) : 5; }

/// Parameter written back to the component vector when a fault of this
/// class is accepted. Class 5 updates the rated head only.
Parameter committed_parameter(int fault_class);

struct SampleRecord {
  ControlVector u;
  ProcessVector y;
  int fault_class = 0;
  int perturbed_index = 0;
  double true_value = 0.0;  // native units of the perturbed parameter

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Multipliers closer to 1 than this are rejected: they are not faults.
inline constexpr double kMultiplierDeadBand = 0.02;

struct SamplingPlan {
  std::vector<double> u1_grid;
  std::vector<double> u2_grid;
  /// Relative multipliers per parameter (index 0 = parameter 1). An empty
  /// grid leaves that parameter unperturbed.
  std::array<std::vector<double>, 6> multipliers;
  /// Reserved for randomized sampling; carried into downstream splits.
  std::uint64_t seed = 0;

  /// 14 x 14 operating grid, 12 multipliers per parameter.
  static SamplingPlan desk_default();

  /// Throws EmptyPlan when an operating grid or every multiplier grid is
  /// empty, InvalidInput on out-of-range or dead-band values.
  void validate() const;

  std::size_t expected_records() const;

  /// Keys: u1_grid, u2_grid, multipliers (all parameters), multipliers.<name>
  /// (one parameter), parameters (restricts which are perturbed), seed.
  static SamplingPlan from_keyvalue(const KeyValueFile& file);
  std::string to_text() const;
};

struct GenerationResult {
  std::vector<SampleRecord> records;
  std::size_t dropped = 0;  // simulations that did not converge
};

/// One record per (u1, u2, parameter, multiplier), in that nesting order.
/// Work is spread across threads; output order does not depend on it.
GenerationResult generate(const SamplingPlan& plan, const ComponentVector& nominal,
                          const LoopConfig& cfg);

struct SplitResult {
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> test;
};

/// Stratified by fault class. Throws TooFewSamples if a class present in
/// `records` has fewer than two rows.
SplitResult split(std::span<const SampleRecord> records, double train_fraction,
                  std::uint64_t seed);

inline constexpr std::string_view kDatasetHeader =
    "u1,u2,p1,p2,p3,p4,fl,fault_class,perturbed_index,true_value";

std::string records_to_csv(std::span<const SampleRecord> records);
std::vector<SampleRecord> records_from_csv(std::string_view text);
void save_records(std::span<const SampleRecord> records, const std::filesystem::path& path);
std::vector<SampleRecord> load_records(const std::filesystem::path& path);

/// Component vector that produced a record: nominal with the perturbed
/// entry replaced.
ComponentVector record_theta(const SampleRecord& r, const ComponentVector& nominal);

}  // namespace hydrotwin
