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

#include "hydrotwin/training.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "hydrotwin/features.hpp"

namespace hydrotwin {

std::optional<double> committed_truth(const ControlVector& u, const ComponentVector& truth,
                                      Parameter perturbed, const ComponentVector& base,
                                      const LoopConfig& cfg) {
  if (perturbed != Parameter::kRatedFlow) return truth[perturbed];
  const double q = solve_operating_point(u, truth, cfg);
  const double head = pump_head(q, u.speed_fraction(), truth, cfg);
  const double equivalent = equivalent_rated_head(u, q, head, base.debit, cfg);
  if (!std::isfinite(equivalent)) return std::nullopt;
  return equivalent;
}

std::optional<double> estimation_target(const SampleRecord& record,
                                        const ComponentVector& nominal,
                                        const LoopConfig& cfg) {
  const auto p = parameter_from_index(record.perturbed_index);
  const auto target = committed_truth(record.u, record_theta(record, nominal), p, nominal, cfg);
  if (target && p == Parameter::kRatedFlow &&
      *target > kMaxEquivalentHeadRatio * nominal.hmt) {
    return std::nullopt;
  }
  return target;
}

FddModels train_models(std::span<const SampleRecord> train, const ComponentVector& nominal,
                       const LoopConfig& cfg, const TrainingOptions& options,
                       TrainingSummary* summary) {
  const auto features = record_features(train, nominal, cfg);
  const auto labels = record_labels(train);

  TrainingSummary local;
  local.classifier_rows = train.size();

  std::array<std::vector<FeatureVector>, kNumFaultClasses> x;
  std::array<std::vector<double>, kNumFaultClasses> y;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto c = static_cast<std::size_t>(train[i].fault_class - 1);
    if (const auto target = estimation_target(train[i], nominal, cfg)) {
      x[c].push_back(features[i]);
      y[c].push_back(*target);
    } else {
      ++local.excluded_rows[c];
    }
  }

  FddModels models{DecisionTree::fit(features, labels, options.tree), {}};

  std::array<std::optional<SvrModel>, kNumFaultClasses> fitted;
  std::array<std::exception_ptr, kNumFaultClasses> failures;
  {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < kNumFaultClasses; ++c) {
      local.estimator_rows[c] = x[c].size();
      if (x[c].size() < 2) continue;
      workers.emplace_back([&, c] {
        try {
          fitted[c] = SvrModel::fit(x[c], y[c], options.svr);
        } catch (...) {
          failures[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (std::size_t c = 0; c < kNumFaultClasses; ++c) {
    if (fitted[c]) {
      local.estimator_converged[c] = fitted[c]->converged();
      models.estimators.set(static_cast<int>(c) + 1, std::move(*fitted[c]));
    }
  }
  if (summary != nullptr) *summary = local;
  return models;
}

}  // namespace hydrotwin
