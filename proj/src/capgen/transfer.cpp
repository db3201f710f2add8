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

#include "captrans/capgen/transfer.hpp"

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::capgen {

void transfer_prefix_params(const lm::LanguageModel& lm, CaptionGenerator& cg, TransferMode mode) {
  if (mode == TransferMode::kNone) {
    cg.set_transfer({});
    return;
  }
  const auto& cfg = cg.config();
  if (cfg.embed_size != lm.embed_size() || cfg.rnn_size != lm.rnn_size()) {
    throw ShapeError("prefix encoder sizes differ: language model E=" + std::to_string(lm.embed_size()) +
                     " H=" + std::to_string(lm.rnn_size()) + ", caption generator E=" +
                     std::to_string(cfg.embed_size) + " H=" + std::to_string(cfg.rnn_size));
  }
  const text::Vocabulary& src = lm.vocab();
  const text::Vocabulary& dst = cg.vocab();
  const nn::Tensor& src_emb = lm.params().value(lm::kEmbeddingParam);
  nn::Tensor emb = cg.params().value(lm::kEmbeddingParam);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::string& tok = dst.token(i);
    if (!src.contains(tok)) {
      throw DataError("token '" + tok + "' of the caption vocabulary is not in the language model vocabulary");
    }
    const auto from = src_emb.row(static_cast<std::size_t>(src.index_of(tok)));
    auto to = emb.row(i);
    std::copy(from.begin(), from.end(), to.begin());
  }
  auto& params = cg.params();
  params.assign(lm::kEmbeddingParam, std::move(emb));
  for (const auto& name : nn::gru_param_names(lm::kGruPrefix)) {
    params.assign(name, lm.params().value(name));
  }
  const bool trainable = mode == TransferMode::kFineTuned;
  for (const auto& name : lm::prefix_param_names()) params.set_trainable(name, trainable);
  cg.set_transfer({mode, nn::params_hash(lm.params())});
}

}  // namespace captrans::capgen
