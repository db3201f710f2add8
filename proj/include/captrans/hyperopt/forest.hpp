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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace captrans::hyperopt {

struct ForestConfig {
  std::size_t trees = 100;
  std::size_t min_leaf = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Axis-aligned regression tree. Leaves keep the mean and count of the
/// targets that reached them.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double mean = 0.0;
    std::size_t count = 0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
};

struct Prediction {
  double mean = 0.0;
  double std = 0.0;  // population std across trees
};

class ForestSurrogate {
 public:
  /// Fits on rows of `x` (one encoded point each) and targets `y`. Needs at
  /// least two rows. Splits minimise the summed squared error; every feature
  /// is considered at every split; each child keeps at least min_leaf rows.
  static ForestSurrogate fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                             const ForestConfig& config);

  Prediction predict(std::span<const double> x) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

}  // namespace captrans::hyperopt
