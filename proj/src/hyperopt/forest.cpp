/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "captrans/hyperopt/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "captrans/errors.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::hyperopt {

void ForestConfig::validate() const {
  if (trees == 0) throw ConfigError("forest needs at least one tree");
  if (min_leaf == 0) throw ConfigError("min_leaf must be positive");
}

double RegressionTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
    const Node& node = nodes[static_cast<std::size_t>(n)];
    n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(n)].mean;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& x, std::span<const double> y, std::size_t min_leaf)
      : x_(x), y_(y), min_leaf_(min_leaf) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    tree_ = RegressionTree{};
    grow(rows);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& rows) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (std::size_t r : rows) sum += y_[r];
    const double mean = sum / static_cast<double>(rows.size());
    tree_.nodes[static_cast<std::size_t>(id)].mean = mean;
    tree_.nodes[static_cast<std::size_t>(id)].count = rows.size();

    double parent_sse = 0.0;
    for (std::size_t r : rows) parent_sse += (y_[r] - mean) * (y_[r] - mean);
    if (rows.size() < 2 * min_leaf_ || parent_sse <= 0.0) return id;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = parent_sse;
    const std::size_t n = rows.size();
    const std::size_t features = x_[rows[0]].size();
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < features; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
      // Prefix sums give the SSE of each side as sum(y^2) - sum(y)^2 / k.
      double left_sum = 0.0;
      double left_sq = 0.0;
      double total_sq = 0.0;
      for (std::size_t r : order) total_sq += y_[r] * y_[r];
      for (std::size_t k = 1; k < n; ++k) {
        const double v = y_[order[k - 1]];
        left_sum += v;
        left_sq += v * v;
        if (k < min_leaf_ || n - k < min_leaf_) continue;
        const double lo = x_[order[k - 1]][f];
        const double hi = x_[order[k]][f];
        if (!(lo < hi)) continue;
        const double right_sum = sum - left_sum;
        const double sse = (left_sq - left_sum * left_sum / static_cast<double>(k)) +
                           (total_sq - left_sq - right_sum * right_sum / static_cast<double>(n - k));
        if (sse < best_sse - 1e-12 * std::max(1.0, parent_sse)) {
          best_sse = sse;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (lo + hi);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left);
    const int r = grow(right);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const std::vector<std::vector<double>>& x_;
  std::span<const double> y_;
  std::size_t min_leaf_;
  RegressionTree tree_;
};

}  // namespace

ForestSurrogate ForestSurrogate::fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                                     const ForestConfig& config) {
  config.validate();
  if (x.size() != y.size()) throw ShapeError("forest inputs and targets differ in length");
  if (x.size() < 2) throw ConfigError("forest needs at least two training points");
  for (const auto& row : x) {
    if (row.size() != x[0].size()) throw ShapeError("forest inputs have ragged rows");
  }
  ForestSurrogate forest;
  TreeBuilder builder(x, y, config.min_leaf);
  for (std::size_t t = 0; t < config.trees; ++t) {
    std::vector<std::size_t> rows(x.size());
    if (config.bootstrap) {
      nn::Rng rng(nn::derive_seed(config.seed, "forest-bootstrap", {static_cast<std::int64_t>(t)}));
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(x.size()));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    forest.trees_.push_back(builder.build(std::move(rows)));
  }
  return forest;
}

Prediction ForestSurrogate::predict(std::span<const double> x) const {
  Prediction p;
  std::vector<double> values;
  values.reserve(trees_.size());
  for (const auto& t : trees_) values.push_back(t.predict(x));
  for (double v : values) p.mean += v;
  p.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - p.mean) * (v - p.mean);
  p.std = std::sqrt(var / static_cast<double>(values.size()));
  return p;
}

}  // namespace captrans::hyperopt
