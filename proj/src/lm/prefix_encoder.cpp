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

#include "captrans/lm/prefix_encoder.hpp"

#include <algorithm>

#include "captrans/errors.hpp"

namespace captrans::lm {

std::vector<std::string> prefix_param_names() {
  std::vector<std::string> names = {kEmbeddingParam};
  for (auto& n : nn::gru_param_names(kGruPrefix)) names.push_back(n);
  return names;
}

void add_prefix_params(nn::ParamStore& store, std::size_t vocab_size, std::size_t embed_size,
                       std::size_t rnn_size, const nn::InitSpec& init) {
  nn::InitSpec emb = init;
  emb.seed = nn::derive_seed(init.seed, kEmbeddingParam);
  store.add(kEmbeddingParam, nn::init_tensor({vocab_size, embed_size}, emb));
  nn::add_gru_params(store, kGruPrefix, embed_size, rnn_size, init);
}

std::size_t SequenceBatch::positions() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

SequenceBatch SequenceBatch::build(std::span<const std::vector<int>* const> sentences) {
  SequenceBatch b;
  b.batch = sentences.size();
  for (const auto* s : sentences) {
    if (s->size() < 2) throw DataError("encoded sentence must contain at least the two boundary tokens");
    b.steps = std::max(b.steps, s->size() - 1);
  }
  const std::size_t n = b.batch * b.steps;
  b.inputs.assign(n, 0);
  b.targets.assign(n, 0);
  b.weights.assign(n, 0.0);
  for (std::size_t s = 0; s < b.batch; ++s) {
    const auto& enc = *sentences[s];
    for (std::size_t t = 0; t + 1 < enc.size(); ++t) {
      const std::size_t row = t * b.batch + s;
      b.inputs[row] = enc[t];
      b.targets[row] = enc[t + 1];
      b.weights[row] = 1.0;
    }
  }
  return b;
}

std::vector<nn::Var> encode_prefixes(nn::Graph& g, const SequenceBatch& batch,
                                     double embedding_dropout, nn::Rng* rng) {
  const nn::Matrix& gru_u = g.value(g.param(kGruPrefix + ".u_z"));
  const auto rnn = gru_u.rows();
  nn::Var h = g.constant(nn::Matrix::Zero(static_cast<Eigen::Index>(batch.batch), rnn));
  std::vector<nn::Var> states;
  states.reserve(batch.steps);
  for (std::size_t t = 0; t < batch.steps; ++t) {
    std::span<const int> ids(batch.inputs.data() + t * batch.batch, batch.batch);
    nn::Var x = g.embedding(kEmbeddingParam, ids);
    if (rng != nullptr) x = g.dropout(x, embedding_dropout, *rng);
    h = nn::gru_step(g, x, h, kGruPrefix);
    states.push_back(h);
  }
  return states;
}

PrefixEncoder::PrefixEncoder(const nn::ParamStore& store)
    : embedding_(nn::to_matrix(store.value(kEmbeddingParam))),
      gru_(nn::GruWeights::from_store(store, kGruPrefix)) {
  if (static_cast<std::size_t>(embedding_.cols()) != gru_.input_size()) {
    throw ShapeError("embedding width does not match GRU input size");
  }
}

nn::RowVector PrefixEncoder::step(const nn::RowVector& h, int token) const {
  if (token < 0 || token >= embedding_.rows()) {
    throw IndexError("token index " + std::to_string(token) + " out of range");
  }
  return nn::gru_step(embedding_.row(token), h, gru_);
}

nn::RowVector PrefixEncoder::encode(std::span<const int> prefix) const {
  nn::RowVector h = initial_state();
  for (int t : prefix) h = step(h, t);
  return h;
}

}  // namespace captrans::lm
