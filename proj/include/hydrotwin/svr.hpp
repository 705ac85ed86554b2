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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrotwin/features.hpp"

namespace hydrotwin {

struct SvrParams {
  double c = 100.0;
  double epsilon = 0.01;  // tube half-width, standardized target units
  double gamma = 1.0 / static_cast<double>(kNumFeatures);
  double tolerance = 1e-3;  // maximal KKT violation at stop
  std::size_t max_sweeps = 10'000;  // one sweep = 2n pair updates
};

/// Per-dimension affine map to zero mean / unit variance. Dimensions with
/// zero spread keep a unit scale.
struct Standardizer {
  FeatureVector mean{};
  FeatureVector scale{};

  static Standardizer fit(std::span<const FeatureVector> x);
  FeatureVector apply(const FeatureVector& x) const;
};

double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma);

/// epsilon-SVR with an RBF kernel, trained by SMO with second-order working
/// set selection. Features and target are standardized inside the model, so
/// a saved model is self-contained.
class SvrModel {
 public:
  /// Throws InvalidInput with fewer than two rows, size mismatch or
  /// non-finite data. Exhausting the sweep budget does not throw; the model
  /// is returned with converged() == false.
  static SvrModel fit(std::span<const FeatureVector> x, std::span<const double> y,
                      SvrParams params = {});

  double predict(const FeatureVector& x) const;

  const SvrParams& params() const { return params_; }
  const Standardizer& feature_standardizer() const { return features_; }
  double target_mean() const { return target_mean_; }
  double target_scale() const { return target_scale_; }
  /// Support vectors in standardized feature units.
  const std::vector<FeatureVector>& support_vectors() const { return support_; }
  const std::vector<double>& dual_coefficients() const { return coef_; }
  /// Standardized-space intercept.
  double bias() const { return bias_; }

  bool converged() const { return converged_; }
  std::size_t iterations() const { return iterations_; }
  /// Largest KKT violation left when the solver stopped.
  double kkt_gap() const { return kkt_gap_; }
  /// Dual objective at the solution (minimization form, standardized units):
  /// 1/2 b'Kb + eps sum|b| - z'b.
  double dual_objective() const { return objective_; }

  std::string serialize() const;
  static SvrModel deserialize(std::string_view text);

 private:
  SvrParams params_;
  Standardizer features_;
  double target_mean_ = 0.0;
  double target_scale_ = 1.0;
  std::vector<FeatureVector> support_;
  std::vector<double> coef_;
  double bias_ = 0.0;
  bool converged_ = true;
  std::size_t iterations_ = 0;
  double kkt_gap_ = 0.0;
  double objective_ = 0.0;
};

void save_model(const SvrModel& model, const std::filesystem::path& path);
SvrModel load_svr(const std::filesystem::path& path);

/// Kind tag of a model file ("tree", "svr"); throws FormatError on a bad
/// header.
std::string model_kind(const std::filesystem::path& path);

}  // namespace hydrotwin
