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
#include "captrans/nn/layers.hpp"

namespace captrans::lm {

// Parameter names shared by the language model and the caption generator;
// these are exactly the entries that transfer between the two.
inline const std::string kEmbeddingParam = "embedding";
inline const std::string kGruPrefix = "gru";

/// Embedding plus the nine GRU tensors.
std::vector<std::string> prefix_param_names();

/// Adds embedding [vocab x embed] and GRU(embed -> rnn) parameters.
void add_prefix_params(nn::ParamStore& store, std::size_t vocab_size, std::size_t embed_size,
                       std::size_t rnn_size, const nn::InitSpec& init);

/// Right-padded, time-major minibatch of encoded sentences. Row t * batch + b
/// of inputs/targets/weights belongs to sentence b at step t. Padded positions
/// carry weight 0.
struct SequenceBatch {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<int> inputs;
  std::vector<int> targets;
  std::vector<double> weights;

  std::size_t positions() const;
  /// Each sentence is [EDGE, w1..wn, EDGE]; it contributes n + 1 predictions.
  static SequenceBatch build(std::span<const std::vector<int>* const> sentences);
};

/// Runs the GRU over every step of the batch from a zero state and returns
/// the per-step states (each batch x rnn). Dropout on the embedded inputs is
/// applied per step when `rng` is non-null.
std::vector<nn::Var> encode_prefixes(nn::Graph& g, const SequenceBatch& batch,
                                     double embedding_dropout, nn::Rng* rng);

/// Inference-time copy of the prefix encoder weights.
class PrefixEncoder {
 public:
  explicit PrefixEncoder(const nn::ParamStore& store);

  nn::RowVector initial_state() const { return nn::RowVector::Zero(static_cast<Eigen::Index>(rnn_size())); }
  /// Consumes one token. Throws IndexError for an out-of-range index.
  nn::RowVector step(const nn::RowVector& h, int token) const;
  /// State after consuming the whole prefix.
  nn::RowVector encode(std::span<const int> prefix) const;

  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding_.rows()); }
  std::size_t rnn_size() const { return gru_.state_size(); }

 private:
  nn::Matrix embedding_;
  nn::GruWeights gru_;
};

}  // namespace captrans::lm
