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

#include "captrans/nn/graph.hpp"

#include <cmath>

#include "captrans/errors.hpp"

namespace captrans::nn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix to_matrix(const Tensor& t) {
  const auto rows = static_cast<Eigen::Index>(t.rows());
  const auto cols = static_cast<Eigen::Index>(t.cols());
  Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      t.values().data(), rows, cols);
  return m.cast<double>();
}

Tensor to_tensor(const Matrix& m, const Shape& shape) {
  std::vector<float> values(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) values[i] = static_cast<float>(m.data()[i]);
  return Tensor(shape, std::move(values));
}

Var Graph::push(Matrix value, bool requires_grad,
                std::function<void(Graph&, std::size_t)> backprop) {
  nodes_.push_back(Node{std::move(value), Matrix(), requires_grad,
                        requires_grad ? std::move(backprop) : nullptr});
  return Var{nodes_.size() - 1};
}

Matrix& Graph::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Graph::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Graph::param(const std::string& name) {
  if (auto it = param_nodes_.find(name); it != param_nodes_.end()) return it->second;
  if (store_ == nullptr) throw StateError("graph has no parameter store");
  const Parameter& p = store_->at(name);
  Var v = push(to_matrix(p.value), p.trainable, [](Graph&, std::size_t) {});
  if (p.trainable) param_leaves_.emplace_back(v.id, name);
  param_nodes_.emplace(name, v);
  return v;
}

Var Graph::embedding(const std::string& table, std::span<const int> indices) {
  if (store_ == nullptr) throw StateError("graph has no parameter store");
  Parameter& p = store_->at(table);
  const Tensor& t = p.value;
  const std::size_t vocab = t.rows();
  const std::size_t dim = t.cols();
  Matrix out(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int k = indices[i];
    if (k < 0 || static_cast<std::size_t>(k) >= vocab) {
      throw IndexError("embedding index " + std::to_string(k) + " out of range [0, " +
                       std::to_string(vocab) + ")");
    }
    auto row = t.row(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < dim; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  std::vector<int> idx(indices.begin(), indices.end());
  Parameter* target = &p;
  return push(std::move(out), p.trainable, [idx = std::move(idx), target, dim](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto row = target->grad.row(static_cast<std::size_t>(idx[i]));
      for (std::size_t j = 0; j < dim; ++j) {
        row[j] += static_cast<float>(go(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
  });
}

Var Graph::matmul(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: inner dimensions differ (" + std::to_string(av.cols()) + " vs " +
                     std::to_string(bv.rows()) + ")");
  }
  return push(av * bv, needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    if (g.needs(a)) g.grad_ref(a.id).noalias() += go * g.value(b).transpose();
    if (g.needs(b)) g.grad_ref(b.id).noalias() += g.value(a).transpose() * go;
  });
}

Var Graph::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  return push(value(a) + value(b), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    if (g.needs(a)) g.grad_ref(a.id) += go;
    if (g.needs(b)) g.grad_ref(b.id) += go;
  });
}

Var Graph::sub(Var a, Var b) {
  require_same_shape(value(a), value(b), "sub");
  return push(value(a) - value(b), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    if (g.needs(a)) g.grad_ref(a.id) += go;
    if (g.needs(b)) g.grad_ref(b.id) -= go;
  });
}

Var Graph::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b),
              [a, b](Graph& g, std::size_t self) {
                const Matrix& go = g.out_grad(self);
                if (g.needs(a)) g.grad_ref(a.id) += go.cwiseProduct(g.value(b));
                if (g.needs(b)) g.grad_ref(b.id) += go.cwiseProduct(g.value(a));
              });
}

Var Graph::add_row(Var a, Var row) {
  const Matrix& av = value(a);
  const Matrix& rv = value(row);
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw ShapeError("add_row: bias of width " + std::to_string(rv.cols()) +
                     " does not match input width " + std::to_string(av.cols()));
  }
  Matrix out = av.rowwise() + rv.row(0);
  return push(std::move(out), needs(a) || needs(row), [a, row](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    if (g.needs(a)) g.grad_ref(a.id) += go;
    if (g.needs(row)) g.grad_ref(row.id) += go.colwise().sum();
  });
}

Var Graph::scale(Var a, double s) {
  return push(value(a) * s, needs(a), [a, s](Graph& g, std::size_t self) {
    g.grad_ref(a.id) += g.out_grad(self) * s;
  });
}

Var Graph::one_minus(Var a) {
  Matrix out = (1.0 - value(a).array()).matrix();
  return push(std::move(out), needs(a), [a](Graph& g, std::size_t self) {
    g.grad_ref(a.id) -= g.out_grad(self);
  });
}

Var Graph::sigmoid(Var a) {
  Matrix out = value(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return push(std::move(out), needs(a), [a](Graph& g, std::size_t self) {
    const Matrix& y = g.value(Var{self});
    g.grad_ref(a.id).array() += g.out_grad(self).array() * y.array() * (1.0 - y.array());
  });
}

Var Graph::tanh(Var a) {
  Matrix out = value(a).array().tanh().matrix();
  return push(std::move(out), needs(a), [a](Graph& g, std::size_t self) {
    const Matrix& y = g.value(Var{self});
    g.grad_ref(a.id).array() += g.out_grad(self).array() * (1.0 - y.array().square());
  });
}

Var Graph::relu(Var a) {
  Matrix out = value(a).cwiseMax(0.0);
  return push(std::move(out), needs(a), [a](Graph& g, std::size_t self) {
    const Matrix& x = g.value(a);
    g.grad_ref(a.id).array() += (x.array() > 0.0).select(g.out_grad(self).array(), 0.0);
  });
}

Var Graph::concat_cols(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.rows() != bv.rows()) throw ShapeError("concat_cols: row counts differ");
  Matrix out(av.rows(), av.cols() + bv.cols());
  out << av, bv;
  const Eigen::Index split = av.cols();
  return push(std::move(out), needs(a) || needs(b), [a, b, split](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    if (g.needs(a)) g.grad_ref(a.id) += go.leftCols(split);
    if (g.needs(b)) g.grad_ref(b.id) += go.rightCols(go.cols() - split);
  });
}

Var Graph::stack_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("stack_rows: no inputs");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  bool any = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw ShapeError("stack_rows: column counts differ");
    rows += value(p).rows();
    any = any || needs(p);
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    out.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), any, [inputs = std::move(inputs)](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    Eigen::Index r = 0;
    for (Var p : inputs) {
      const Eigen::Index n = g.value(p).rows();
      if (g.needs(p)) g.grad_ref(p.id) += go.middleRows(r, n);
      r += n;
    }
  });
}

Var Graph::tile_rows(Var a, std::size_t times) {
  const Matrix& av = value(a);
  const Eigen::Index n = av.rows();
  Matrix out(n * static_cast<Eigen::Index>(times), av.cols());
  for (std::size_t t = 0; t < times; ++t) out.middleRows(static_cast<Eigen::Index>(t) * n, n) = av;
  return push(std::move(out), needs(a), [a, n, times](Graph& g, std::size_t self) {
    const Matrix& go = g.out_grad(self);
    Matrix& ga = g.grad_ref(a.id);
    for (std::size_t t = 0; t < times; ++t) ga += go.middleRows(static_cast<Eigen::Index>(t) * n, n);
  });
}

Var Graph::dropout(Var a, double rate, Rng& rng) {
  if (rate < 0.0 || rate > 0.5) {
    throw ConfigError("dropout rate must be in [0, 0.5], got " + std::to_string(rate));
  }
  if (rate == 0.0) return a;
  const Matrix& av = value(a);
  Matrix mask(av.rows(), av.cols());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  Matrix out = av.cwiseProduct(mask);
  return push(std::move(out), needs(a), [a, mask = std::move(mask)](Graph& g, std::size_t self) {
    g.grad_ref(a.id) += g.out_grad(self).cwiseProduct(mask);
  });
}

Var Graph::softmax_cross_entropy(Var logits, std::span<const int> targets,
                                 std::span<const double> weights) {
  const Matrix& z = value(logits);
  const auto rows = static_cast<std::size_t>(z.rows());
  if (targets.size() != rows || weights.size() != rows) {
    throw ShapeError("softmax_cross_entropy: expected " + std::to_string(rows) + " targets and weights");
  }
  Matrix probs = Matrix::Zero(z.rows(), z.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (weights[i] == 0.0) continue;
    const int t = targets[i];
    if (t < 0 || t >= z.cols()) {
      throw IndexError("softmax target " + std::to_string(t) + " out of range");
    }
    const auto r = static_cast<Eigen::Index>(i);
    const double m = z.row(r).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double e = std::exp(z(r, j) - m);
      probs(r, j) = e;
      denom += e;
    }
    probs.row(r) /= denom;
    loss += weights[i] * -((z(r, t) - m) - std::log(denom));
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  std::vector<int> tgt(targets.begin(), targets.end());
  std::vector<double> w(weights.begin(), weights.end());
  return push(std::move(out), needs(logits),
              [logits, probs = std::move(probs), tgt = std::move(tgt), w = std::move(w)](
                  Graph& g, std::size_t self) {
                const double go = g.out_grad(self)(0, 0);
                Matrix& gz = g.grad_ref(logits.id);
                for (std::size_t i = 0; i < tgt.size(); ++i) {
                  if (w[i] == 0.0) continue;
                  const auto r = static_cast<Eigen::Index>(i);
                  gz.row(r) += (go * w[i]) * probs.row(r);
                  gz(r, tgt[i]) -= go * w[i];
                }
              });
}

void Graph::backward(Var loss) {
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw ShapeError("backward: loss must be a 1x1 value");
  for (Node& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[loss.id].requires_grad) return;
  grad_ref(loss.id)(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backprop) continue;
    n.backprop(*this, i);
  }
  for (const auto& [id, name] : param_leaves_) {
    const Matrix& gm = nodes_[id].grad;
    if (gm.size() == 0) continue;
    Tensor& acc = store_->at(name).grad;
    for (Eigen::Index k = 0; k < gm.size(); ++k) acc[static_cast<std::size_t>(k)] += static_cast<float>(gm.data()[k]);
  }
}

}  // namespace captrans::nn
