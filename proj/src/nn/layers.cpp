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

#include "captrans/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "captrans/errors.hpp"
#include "captrans/nn/init.hpp"

namespace captrans::nn {

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "none"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "none" || s == "linear") return Activation::kNone;
  throw ConfigError("unknown activation '" + s + "' (expected relu or none)");
}

namespace {
const char* kGruSuffixes[] = {"w_z", "w_r", "w_c", "u_z", "u_r", "u_c", "b_z", "b_r", "b_c"};

RowVector row_of(const Tensor& t) {
  return Eigen::Map<const Eigen::RowVectorXf>(t.values().data(), static_cast<Eigen::Index>(t.size()))
      .cast<double>();
}
}  // namespace

std::vector<std::string> gru_param_names(const std::string& prefix) {
  std::vector<std::string> out;
  for (const char* s : kGruSuffixes) out.push_back(prefix + "." + s);
  return out;
}

void add_gru_params(ParamStore& store, const std::string& prefix, std::size_t input_size,
                    std::size_t state_size, const InitSpec& init) {
  int k = 0;
  for (const char* gate : {"z", "r", "c"}) {
    InitSpec w_spec = init;
    w_spec.seed = derive_seed(init.seed, prefix + ".w_" + gate, {k});
    store.add(prefix + ".w_" + gate, init_tensor({input_size, state_size}, w_spec));
    InitSpec u_spec = init;
    u_spec.seed = derive_seed(init.seed, prefix + ".u_" + gate, {k});
    store.add(prefix + ".u_" + gate, init_tensor({state_size, state_size}, u_spec));
    store.add(prefix + ".b_" + gate, Tensor({state_size}));
    ++k;
  }
}

GruWeights GruWeights::from_store(const ParamStore& store, const std::string& prefix) {
  GruWeights w;
  w.w_z = to_matrix(store.value(prefix + ".w_z"));
  w.w_r = to_matrix(store.value(prefix + ".w_r"));
  w.w_c = to_matrix(store.value(prefix + ".w_c"));
  w.u_z = to_matrix(store.value(prefix + ".u_z"));
  w.u_r = to_matrix(store.value(prefix + ".u_r"));
  w.u_c = to_matrix(store.value(prefix + ".u_c"));
  w.b_z = row_of(store.value(prefix + ".b_z"));
  w.b_r = row_of(store.value(prefix + ".b_r"));
  w.b_c = row_of(store.value(prefix + ".b_c"));
  return w;
}

RowVector gru_step(const RowVector& x, const RowVector& h_prev, const GruWeights& w) {
  if (static_cast<std::size_t>(x.size()) != w.input_size()) {
    throw ShapeError("gru_step: input of size " + std::to_string(x.size()) + ", expected " +
                     std::to_string(w.input_size()));
  }
  if (static_cast<std::size_t>(h_prev.size()) != w.state_size()) {
    throw ShapeError("gru_step: state of size " + std::to_string(h_prev.size()) + ", expected " +
                     std::to_string(w.state_size()));
  }
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  RowVector z = (x * w.w_z + h_prev * w.u_z + w.b_z).unaryExpr(sigmoid);
  RowVector r = (x * w.w_r + h_prev * w.u_r + w.b_r).unaryExpr(sigmoid);
  RowVector c = (x * w.w_c + r.cwiseProduct(h_prev) * w.u_c + w.b_c).array().tanh().matrix();
  return (1.0 - z.array()).matrix().cwiseProduct(h_prev) + z.cwiseProduct(c);
}

Var gru_step(Graph& g, Var x, Var h_prev, const std::string& prefix) {
  auto gate = [&](const char* name, Var h_in) {
    Var xw = g.matmul(x, g.param(prefix + ".w_" + name));
    Var hu = g.matmul(h_in, g.param(prefix + ".u_" + name));
    return g.add_row(g.add(xw, hu), g.param(prefix + ".b_" + name));
  };
  Var z = g.sigmoid(gate("z", h_prev));
  Var r = g.sigmoid(gate("r", h_prev));
  Var c = g.tanh(gate("c", g.mul(r, h_prev)));
  return g.add(g.mul(g.one_minus(z), h_prev), g.mul(z, c));
}

RowVector dense(const RowVector& x, const Matrix& w, const RowVector& b, Activation act) {
  if (x.size() != w.rows() || b.size() != w.cols()) throw ShapeError("dense: shape mismatch");
  RowVector y = x * w + b;
  if (act == Activation::kRelu) y = y.cwiseMax(0.0);
  return y;
}

Var dense(Graph& g, Var x, Var w, Var b, Activation act) {
  Var y = g.add_row(g.matmul(x, w), b);
  return act == Activation::kRelu ? g.relu(y) : y;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - m);
  const double log_denom = std::log(denom);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = (logits[i] - m) - log_denom;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    denom += out[i];
  }
  for (double& p : out) p /= denom;
  return out;
}

SoftmaxResult softmax_cross_entropy(std::span<const double> logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size()) {
    throw IndexError("softmax target " + std::to_string(target) + " out of range");
  }
  SoftmaxResult r;
  r.probs = softmax(logits);
  r.loss = -log_softmax(logits)[static_cast<std::size_t>(target)];
  return r;
}

std::vector<double> dropout(std::span<const double> x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate > 0.5) {
    throw ConfigError("dropout rate must be in [0, 0.5], got " + std::to_string(rate));
  }
  std::vector<double> out(x.begin(), x.end());
  if (!training || rate == 0.0) return out;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& v : out) v = rng.uniform() < rate ? 0.0 : v * keep_scale;
  return out;
}

double clip_by_global_norm(std::span<const std::span<float>> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("max gradient norm must be positive");
  double sq = 0.0;
  for (auto g : grads) {
    for (float v : g) sq += static_cast<double>(v) * v;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto g : grads) {
      for (float& v : g) v = static_cast<float>(v * factor);
    }
  }
  return norm;
}

double clip_by_global_norm(ParamStore& store, double max_norm) {
  std::vector<std::span<float>> slices;
  for (auto& [name, p] : store) {
    if (p.trainable) slices.push_back(p.grad.values());
  }
  return clip_by_global_norm(std::span<const std::span<float>>(slices), max_norm);
}

double global_grad_norm(const ParamStore& store) {
  double sq = 0.0;
  for (const auto& [name, p] : store) {
    if (!p.trainable) continue;
    for (float v : p.grad.values()) sq += static_cast<double>(v) * v;
  }
  return std::sqrt(sq);
}

}  // namespace captrans::nn
