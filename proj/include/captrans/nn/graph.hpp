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

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "captrans/nn/param_store.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::nn {

// The tape computes in double precision. Parameters live in float32 and are
// widened when they enter a graph; gradients are narrowed again on flush.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

Matrix to_matrix(const Tensor& t);
Tensor to_tensor(const Matrix& m, const Shape& shape);

struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape over 2-D matrices. Nodes are appended in evaluation
/// order, so a reverse sweep over the node list is a valid topological order.
class Graph {
 public:
  explicit Graph(ParamStore* store = nullptr) : store_(store) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a store entry. Repeated calls with one name return the same
  /// node. Frozen parameters enter as constants and receive no gradient.
  Var param(const std::string& name);
  /// Gathers rows `indices` of the named table; backward scatter-adds into
  /// the looked-up rows of the store gradient only.
  Var embedding(const std::string& table, std::span<const int> indices);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  /// a (n x m) + row (1 x m), broadcast over rows.
  Var add_row(Var a, Var row);
  Var scale(Var a, double s);
  Var one_minus(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var concat_cols(Var a, Var b);
  Var stack_rows(std::span<const Var> parts);
  Var tile_rows(Var a, std::size_t times);
  /// Inverted dropout. Rate 0 returns `a` unchanged.
  Var dropout(Var a, double rate, Rng& rng);
  /// Sum over rows i of weights[i] * -log softmax(logits_i)[targets[i]].
  /// Rows with zero weight are skipped entirely. Result is 1 x 1.
  Var softmax_cross_entropy(Var logits, std::span<const int> targets,
                            std::span<const double> weights);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }
  /// Gradient of the last backward() target with respect to v (may be empty
  /// if v does not influence it).
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(loss)/d(loss) = 1, sweeps the tape and adds parameter gradients
  /// into the store accumulators.
  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Graph&, std::size_t)> backprop;
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Graph&, std::size_t)> backprop);
  Matrix& grad_ref(std::size_t id);
  const Matrix& out_grad(std::size_t id) const { return nodes_[id].grad; }
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  ParamStore* store_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Var> param_nodes_;
  std::vector<std::pair<std::size_t, std::string>> param_leaves_;
};

}  // namespace captrans::nn
