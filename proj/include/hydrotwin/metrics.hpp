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
#include <string>
#include <vector>

#include "hydrotwin/dataset.hpp"

namespace hydrotwin {

/// 5x5 localization counts. Rows are classifications, columns are truths.
class ConfusionMatrix {
 public:
  using Counts = std::array<std::array<std::size_t, kNumFaultClasses>, kNumFaultClasses>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Counts& counts) : counts_(counts) {}

  void add(int predicted, int truth);
  std::size_t at(int predicted, int truth) const;
  const Counts& counts() const { return counts_; }

  std::size_t truth_total(int truth) const;
  std::size_t total() const;
  /// Diagonal over total; 0 for an empty matrix.
  double overall_accuracy() const;
  /// Share of the truth column classified correctly, in percent.
  double class_accuracy_percent(int truth) const;
  /// Every cell divided by its truth column total, in percent.
  std::array<std::array<double, kNumFaultClasses>, kNumFaultClasses> column_percent() const;

  std::string counts_csv() const;
  std::string percent_csv() const;
  /// Fixed-width table with class names on both axes.
  std::string format_counts() const;
  std::string format_percent() const;

 private:
  Counts counts_{};
};

/// Display name of a fault class: theta1..theta4, theta5&6.
std::string fault_class_name(int fault_class);

struct ErrorStats {
  std::size_t count = 0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);
ErrorStats summarize_errors(std::span<const double> values);

}  // namespace hydrotwin
