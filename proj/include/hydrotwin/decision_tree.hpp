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

struct TreeParams {
  int max_depth = 20;
  std::size_t min_samples_leaf = 2;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
  /// Training rows reaching this node, per entry of DecisionTree::classes().
  std::vector<std::size_t> histogram;

  bool is_leaf() const { return feature < 0; }
};

/// CART classifier grown greedily on Gini impurity.
///
/// Candidate thresholds are midpoints between consecutive distinct values of
/// a feature. Among equally good splits the lowest feature index wins, then
/// the lowest threshold; impurities are computed from integer class counts,
/// so the fitted tree does not depend on row order.
class DecisionTree {
 public:
  /// Throws InvalidInput with fewer than two distinct labels, mismatched
  /// sizes or non-finite features. Rows that are identical but carry
  /// different labels do not throw; the leaf takes the majority label
  /// (ties to the lowest) and degenerate() reports it.
  static DecisionTree fit(std::span<const FeatureVector> x, std::span<const int> labels,
                          TreeParams params = {});

  /// Goes left iff feature <= threshold.
  int predict(const FeatureVector& x) const;
  const TreeNode& leaf_for(const FeatureVector& x) const;

  /// All classes ordered by their count in x's leaf, most frequent first;
  /// ties go to the lowest label.
  std::vector<int> ranked_classes(const FeatureVector& x) const;

  const std::vector<int>& classes() const { return classes_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  bool degenerate() const { return degenerate_; }
  int depth() const;
  std::size_t leaf_count() const;

  std::string serialize() const;
  static DecisionTree deserialize(std::string_view text);

 private:
  std::vector<int> classes_;
  std::vector<TreeNode> nodes_;
  TreeParams params_;
  bool degenerate_ = false;
};

void save_model(const DecisionTree& model, const std::filesystem::path& path);
DecisionTree load_tree(const std::filesystem::path& path);

}  // namespace hydrotwin
