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

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "captrans/lm/prefix_encoder.hpp"
#include "captrans/lm/training.hpp"
#include "captrans/nn/param_store.hpp"
#include "captrans/text/corpus.hpp"
#include "captrans/text/vocabulary.hpp"

namespace captrans::lm {

/// GRU language model: embedding -> GRU -> softmax over its own vocabulary.
class LanguageModel {
 public:
  /// Fresh model. Weights follow `init`; biases start at zero.
  static LanguageModel create(text::Vocabulary vocab, std::size_t embed_size, std::size_t rnn_size,
                              const nn::InitSpec& init);

  const text::Vocabulary& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t embed_size() const { return embed_size_; }
  std::size_t rnn_size() const { return rnn_size_; }
  const nn::InitSpec& init_spec() const { return init_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// Summed cross-entropy over all weighted positions of the batch. Dropout is
  /// active only when `rng` is non-null.
  nn::Var loss(nn::Graph& g, const SequenceBatch& batch, double embedding_dropout,
               double rnn_dropout, nn::Rng* rng) const;

  /// Next-token distribution after `prefix`, which must start with EDGE.
  std::vector<double> next_distribution(std::span<const int> prefix) const;
  /// log p(encoded[i+1] | encoded[0..i]) for every i; encoded starts with EDGE.
  std::vector<double> token_log_probs(std::span<const int> encoded) const;

  void save(const std::filesystem::path& dir) const;
  static LanguageModel load(const std::filesystem::path& dir);

 private:
  LanguageModel() = default;
  void check_dims() const;

  text::Vocabulary vocab_;
  std::size_t embed_size_ = 0;
  std::size_t rnn_size_ = 0;
  nn::InitSpec init_;
  nn::ParamStore params_;
};

inline const std::string kLmSoftmaxWeight = "softmax.w";
inline const std::string kLmSoftmaxBias = "softmax.b";


/// Minibatch training with clipping, weight decay and (optionally) early
/// stopping on validation perplexity. Both corpora are encoded with the
/// model's vocabulary. Same seed and config give bit-identical weights.
TrainHistory train_lm(LanguageModel& model, const text::Corpus& train, const text::Corpus& val,
                      const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Trains exactly one epoch; returns mean loss per predicted position.
double train_lm_epoch(LanguageModel& model, const std::vector<std::vector<int>>& encoded,
                      nn::Optimizer& optimizer, const TrainConfig& config, int epoch);

}  // namespace captrans::lm
