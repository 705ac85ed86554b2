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

#include "hydrotwin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hydrotwin/errors.hpp"

namespace hydrotwin {
namespace {

std::size_t slot(int fault_class) {
  if (fault_class < 1 || fault_class > kNumFaultClasses) {
    throw InvalidInput("fault class out of range: " + std::to_string(fault_class));
  }
  return static_cast<std::size_t>(fault_class - 1);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

template <typename CellFn>
std::string format_table(CellFn cell) {
  constexpr std::size_t kWidth = 11;
  std::string out = pad_left("class\\truth", 14);
  for (int t = 1; t <= kNumFaultClasses; ++t) out += pad_left(fault_class_name(t), kWidth);
  out += '\n';
  for (int p = 1; p <= kNumFaultClasses; ++p) {
    out += pad_left(fault_class_name(p), 14);
    for (int t = 1; t <= kNumFaultClasses; ++t) out += pad_left(cell(p, t), kWidth);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string fault_class_name(int fault_class) {
  slot(fault_class);
  return fault_class == 5 ? "theta5&6" : "theta" + std::to_string(fault_class);
}

void ConfusionMatrix::add(int predicted, int truth) { ++counts_[slot(predicted)][slot(truth)]; }

std::size_t ConfusionMatrix::at(int predicted, int truth) const {
  return counts_[slot(predicted)][slot(truth)];
}

std::size_t ConfusionMatrix::truth_total(int truth) const {
  std::size_t n = 0;
  for (const auto& row : counts_) n += row[slot(truth)];
  return n;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts_) n += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return n;
}

double ConfusionMatrix::overall_accuracy() const {
  const auto n = total();
  if (n == 0) return 0.0;
  std::size_t diag = 0;
  for (std::size_t k = 0; k < counts_.size(); ++k) diag += counts_[k][k];
  return static_cast<double>(diag) / static_cast<double>(n);
}

double ConfusionMatrix::class_accuracy_percent(int truth) const {
  const auto n = truth_total(truth);
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(at(truth, truth)) / static_cast<double>(n);
}

std::array<std::array<double, kNumFaultClasses>, kNumFaultClasses>
ConfusionMatrix::column_percent() const {
  std::array<std::array<double, kNumFaultClasses>, kNumFaultClasses> out{};
  for (int t = 1; t <= kNumFaultClasses; ++t) {
    const auto n = truth_total(t);
    for (int p = 1; p <= kNumFaultClasses; ++p) {
      out[slot(p)][slot(t)] =
          n == 0 ? 0.0 : 100.0 * static_cast<double>(at(p, t)) / static_cast<double>(n);
    }
  }
  return out;
}

std::string ConfusionMatrix::counts_csv() const {
  std::string out = "classification";
  for (int t = 1; t <= kNumFaultClasses; ++t) out += "," + fault_class_name(t);
  out += '\n';
  for (int p = 1; p <= kNumFaultClasses; ++p) {
    out += fault_class_name(p);
    for (int t = 1; t <= kNumFaultClasses; ++t) out += "," + std::to_string(at(p, t));
    out += '\n';
  }
  return out;
}

std::string ConfusionMatrix::percent_csv() const {
  const auto pct = column_percent();
  std::string out = "classification";
  for (int t = 1; t <= kNumFaultClasses; ++t) out += "," + fault_class_name(t);
  out += '\n';
  for (int p = 1; p <= kNumFaultClasses; ++p) {
    out += fault_class_name(p);
    for (int t = 1; t <= kNumFaultClasses; ++t) out += "," + fixed(pct[slot(p)][slot(t)], 2);
    out += '\n';
  }
  return out;
}

std::string ConfusionMatrix::format_counts() const {
  return format_table([&](int p, int t) { return std::to_string(at(p, t)); });
}

std::string ConfusionMatrix::format_percent() const {
  const auto pct = column_percent();
  return format_table([&](int p, int t) { return fixed(pct[slot(p)][slot(t)], 2) + "%"; });
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ErrorStats summarize_errors(std::span<const double> values) {
  ErrorStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  s.median = quantile(v, 0.5);
  s.p90 = quantile(v, 0.9);
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

}  // namespace hydrotwin
