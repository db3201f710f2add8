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

#include <span>
#include <string>
#include <vector>

#include "captrans/nn/graph.hpp"
#include "captrans/nn/init.hpp"

namespace captrans::nn {

enum class Activation { kNone, kRelu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

/// GRU weights in the row-vector convention: x is 1 x in, W_* is in x hidden,
/// U_* is hidden x hidden, b_* is 1 x hidden.
struct GruWeights {
  Matrix w_z, w_r, w_c;
  Matrix u_z, u_r, u_c;
  RowVector b_z, b_r, b_c;

  std::size_t input_size() const { return static_cast<std::size_t>(w_z.rows()); }
  std::size_t state_size() const { return static_cast<std::size_t>(u_z.rows()); }
  /// Loads the nine `<prefix>.{w,u,b}_{z,r,c}` entries.
  static GruWeights from_store(const ParamStore& store, const std::string& prefix);
};

/// Names of the nine GRU parameters under `prefix`.
std::vector<std::string> gru_param_names(const std::string& prefix);
/// Adds GRU parameters to `store`: weights from `init` (one derived seed per
/// matrix), biases zero.
void add_gru_params(ParamStore& store, const std::string& prefix, std::size_t input_size,
                    std::size_t state_size, const InitSpec& init);

/// z = sig(x W_z + h U_z + b_z), r = sig(x W_r + h U_r + b_r),
/// c = tanh(x W_c + (r * h) U_c + b_c), h' = (1 - z) * h + z * c.
RowVector gru_step(const RowVector& x, const RowVector& h_prev, const GruWeights& w);

/// The same step recorded on a tape, batched over rows of x and h_prev.
Var gru_step(Graph& g, Var x, Var h_prev, const std::string& prefix);

RowVector dense(const RowVector& x, const Matrix& w, const RowVector& b, Activation act);
Var dense(Graph& g, Var x, Var w, Var b, Activation act);

struct SoftmaxResult {
  double loss = 0.0;
  std::vector<double> probs;
};

/// Max-shifted softmax and -log p[target].
SoftmaxResult softmax_cross_entropy(std::span<const double> logits, int target);
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

/// Inverted dropout on a plain vector; identity when !training or rate == 0.
std::vector<double> dropout(std::span<const double> x, double rate, Rng& rng, bool training);

/// Scales all gradient slices by max_norm / norm when the global L2 norm
/// exceeds max_norm. Returns the norm before clipping.
double clip_by_global_norm(std::span<const std::span<float>> grads, double max_norm);
/// Same, over the trainable entries of a store.
double clip_by_global_norm(ParamStore& store, double max_norm);
double global_grad_norm(const ParamStore& store);

}  // namespace captrans::nn
