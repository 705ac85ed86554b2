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

#include "hydrotwin/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "hydrotwin/errors.hpp"
#include "model_format.hpp"

namespace hydrotwin {
namespace {

constexpr std::string_view kTreeKind = "tree";

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureVector> x, std::vector<std::size_t> class_of,
              std::size_t n_classes, const TreeParams& params)
      : x_(x), class_of_(std::move(class_of)), n_classes_(n_classes), params_(params) {}

  int build(std::vector<std::size_t>& rows, int depth, std::vector<TreeNode>& nodes,
            const std::vector<int>& classes) {
    TreeNode node;
    node.histogram.assign(n_classes_, 0);
    for (const auto r : rows) ++node.histogram[class_of_[r]];
    // max_element returns the first maximum, i.e. the lowest label.
    const auto majority =
        std::max_element(node.histogram.begin(), node.histogram.end()) - node.histogram.begin();
    node.label = classes[static_cast<std::size_t>(majority)];

    const bool pure = node.histogram[static_cast<std::size_t>(majority)] == rows.size();
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (pure || depth >= params_.max_depth || rows.size() < 2 * params_.min_samples_leaf) {
      return index;
    }

    bool any_varying = false;
    const auto split = best_split(rows, node.histogram, any_varying);
    if (split.feature < 0) {
      if (!any_varying) degenerate = true;
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (const auto r : rows) {
      (x_[r][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(left, depth + 1, nodes, classes);
    const int r = build(right, depth + 1, nodes, classes);
    auto& self = nodes[static_cast<std::size_t>(index)];
    self.feature = split.feature;
    self.threshold = split.threshold;
    self.left = l;
    self.right = r;
    return index;
  }

  bool degenerate = false;

 private:
  // Maximizes sum_c nL_c^2 / nL + sum_c nR_c^2 / nR, which is equivalent to
  // minimizing the size-weighted Gini impurity of the children.
  SplitChoice best_split(const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& totals, bool& any_varying) const {
    SplitChoice best;
    double best_score = -1.0;
    const std::size_t n = rows.size();
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(n_classes_);
    std::vector<std::size_t> right(n_classes_);

    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
      if (x_[order.front()][f] < x_[order.back()][f]) any_varying = true;

      std::fill(left.begin(), left.end(), 0);
      right = totals;
      std::uint64_t sq_left = 0;
      std::uint64_t sq_right = 0;
      for (const auto c : right) sq_right += static_cast<std::uint64_t>(c) * c;

      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto c = class_of_[order[k]];
        sq_left += 2 * left[c] + 1;
        sq_right -= 2 * right[c] - 1;
        ++left[c];
        --right[c];

        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < params_.min_samples_leaf) continue;
        if (n_right < params_.min_samples_leaf) break;
        const double a = x_[order[k]][f];
        const double b = x_[order[k + 1]][f];
        if (!(a < b)) continue;

        const double score = static_cast<double>(sq_left) / static_cast<double>(n_left) +
                             static_cast<double>(sq_right) / static_cast<double>(n_right);
        if (score > best_score) {
          best_score = score;
          double mid = a + 0.5 * (b - a);
          if (!(mid < b)) mid = a;
          best = {static_cast<int>(f), mid};
        }
      }
    }
    return best;
  }

  std::span<const FeatureVector> x_;
  std::vector<std::size_t> class_of_;
  std::size_t n_classes_;
  TreeParams params_;
};

}  // namespace

DecisionTree DecisionTree::fit(std::span<const FeatureVector> x, std::span<const int> labels,
                               TreeParams params) {
  if (x.size() != labels.size()) throw InvalidInput("feature/label count mismatch");
  if (params.max_depth < 0) throw InvalidInput("max_depth must be >= 0");
  if (params.min_samples_leaf < 1) throw InvalidInput("min_samples_leaf must be >= 1");
  for (const auto& row : x) {
    for (const double v : row) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite feature value");
    }
  }

  DecisionTree tree;
  tree.params_ = params;
  tree.classes_.assign(labels.begin(), labels.end());
  std::sort(tree.classes_.begin(), tree.classes_.end());
  tree.classes_.erase(std::unique(tree.classes_.begin(), tree.classes_.end()),
                      tree.classes_.end());
  if (tree.classes_.size() < 2) throw InvalidInput("need at least two classes to fit a tree");

  std::vector<std::size_t> class_of(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    class_of[i] = static_cast<std::size_t>(
        std::lower_bound(tree.classes_.begin(), tree.classes_.end(), labels[i]) -
        tree.classes_.begin());
  }

  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeBuilder builder(x, std::move(class_of), tree.classes_.size(), params);
  builder.build(rows, 0, tree.nodes_, tree.classes_);
  tree.degenerate_ = builder.degenerate;
  return tree;
}

const TreeNode& DecisionTree::leaf_for(const FeatureVector& x) const {
  if (nodes_.empty()) throw InvalidInput("tree is empty");
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const bool go_left = x[static_cast<std::size_t>(node->feature)] <= node->threshold;
    node = &nodes_[static_cast<std::size_t>(go_left ? node->left : node->right)];
  }
  return *node;
}

int DecisionTree::predict(const FeatureVector& x) const { return leaf_for(x).label; }

std::vector<int> DecisionTree::ranked_classes(const FeatureVector& x) const {
  const auto& leaf = leaf_for(x);
  std::vector<std::size_t> idx(classes_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return leaf.histogram[a] > leaf.histogram[b];
  });
  std::vector<int> out;
  out.reserve(idx.size());
  for (const auto i : idx) out.push_back(classes_[i]);
  return out;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> depth_of(nodes_.size(), 0);
  int deepest = 0;
  // Children are always stored after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth_of[i]);
    if (!nodes_[i].is_leaf()) {
      depth_of[static_cast<std::size_t>(nodes_[i].left)] = depth_of[i] + 1;
      depth_of[static_cast<std::size_t>(nodes_[i].right)] = depth_of[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::string DecisionTree::serialize() const {
  std::ostringstream out;
  out << detail::model_header(kTreeKind);
  out << "max_depth " << params_.max_depth << '\n'
      << "min_samples_leaf " << params_.min_samples_leaf << '\n'
      << "degenerate " << (degenerate_ ? 1 : 0) << '\n'
      << "classes " << classes_.size();
  for (const int c : classes_) out << ' ' << c;
  out << "\nnodes " << nodes_.size() << '\n';
  for (const auto& n : nodes_) {
    out << "node " << n.feature << ' ' << format_exact(n.threshold) << ' ' << n.left << ' '
        << n.right << ' ' << n.label;
    for (const auto h : n.histogram) out << ' ' << h;
    out << '\n';
  }
  return out.str();
}

DecisionTree DecisionTree::deserialize(std::string_view text) {
  detail::ModelReader in(text, kTreeKind);
  DecisionTree tree;
  in.expect("max_depth");
  tree.params_.max_depth = static_cast<int>(in.integer());
  in.expect("min_samples_leaf");
  tree.params_.min_samples_leaf = in.count();
  in.expect("degenerate");
  tree.degenerate_ = in.integer() != 0;
  in.expect("classes");
  const auto n_classes = in.count(1000);
  for (std::size_t i = 0; i < n_classes; ++i) {
    tree.classes_.push_back(static_cast<int>(in.integer()));
  }
  if (!std::is_sorted(tree.classes_.begin(), tree.classes_.end())) {
    throw FormatError("class list must be sorted");
  }
  in.expect("nodes");
  const auto n_nodes = in.count();
  if (n_nodes == 0) throw FormatError("tree has no nodes");
  tree.nodes_.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    auto& n = tree.nodes_[i];
    in.expect("node");
    n.feature = static_cast<int>(in.integer());
    n.threshold = in.number();
    n.left = static_cast<int>(in.integer());
    n.right = static_cast<int>(in.integer());
    n.label = static_cast<int>(in.integer());
    n.histogram.resize(n_classes);
    for (auto& h : n.histogram) h = in.count();

    if (n.feature < -1 || n.feature >= static_cast<int>(kNumFeatures)) {
      throw FormatError("node feature index out of range");
    }
    if (!n.is_leaf()) {
      const auto self = static_cast<int>(i);
      const auto limit = static_cast<int>(n_nodes);
      if (n.left <= self || n.right <= self || n.left >= limit || n.right >= limit) {
        throw FormatError("node child index out of range");
      }
    }
    if (!std::binary_search(tree.classes_.begin(), tree.classes_.end(), n.label)) {
      throw FormatError("node label not in class list");
    }
  }
  in.finish();
  return tree;
}

void save_model(const DecisionTree& model, const std::filesystem::path& path) {
  write_text_file(path, model.serialize());
}

DecisionTree load_tree(const std::filesystem::path& path) {
  return DecisionTree::deserialize(read_text_file(path));
}

}  // namespace hydrotwin
