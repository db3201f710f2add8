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

#include "captrans/capgen/train.hpp"

#include <map>

#include "captrans/errors.hpp"

namespace captrans::capgen {

void CaptionTrainConfig::validate() const {
  base.validate();
  for (double d : {image_dropout, post_image_dropout}) {
    if (!(d >= 0.0 && d <= 0.5)) throw ConfigError("dropout rates must be in [0, 0.5]");
  }
}

CaptionDropout CaptionTrainConfig::dropout() const {
  return CaptionDropout{image_dropout, post_image_dropout, base.embedding_dropout, base.rnn_dropout};
}

EncodedCaptions encode_captions(const CaptionGenerator& model, std::span<const text::CaptionItem* const> items,
                                const text::FeatureStore& features) {
  EncodedCaptions out;
  out.images.resize(static_cast<Eigen::Index>(items.size()),
                    static_cast<Eigen::Index>(model.config().feature_size));
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.images.row(static_cast<Eigen::Index>(i)) = model.prepare_image(features.features(items[i]->image_id));
    for (const auto& caption : items[i]->captions) {
      out.examples.push_back(CaptionExample{i, text::encode_sentence(caption, model.vocab())});
    }
  }
  return out;
}

std::vector<lm::ScoredSentence> score_captions(const CaptionGenerator& model,
                                               std::span<const text::CaptionItem* const> items,
                                               const text::FeatureStore& features) {
  std::vector<lm::ScoredSentence> out;
  for (const auto* item : items) {
    const CaptionDecoder dec(model, features.features(item->image_id));
    for (const auto& caption : item->captions) {
      const std::vector<int> enc = text::encode_sentence(caption, model.vocab());
      lm::ScoredSentence s;
      auto h = dec.start();
      for (std::size_t i = 1; i < enc.size(); ++i) {
        s.log_probs.push_back(dec.log_probs(h)[static_cast<std::size_t>(enc[i])]);
        s.targets.push_back(enc[i]);
        if (i + 1 < enc.size()) h = dec.advance(h, enc[i]);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

double caption_perplexity(const CaptionGenerator& model, std::span<const text::CaptionItem* const> items,
                          const text::FeatureStore& features, lm::PerplexityMode mode) {
  const auto scores = score_captions(model, items, features);
  return lm::perplexity_from_scores(scores, mode);
}

double train_capgen_epoch(CaptionGenerator& model, const EncodedCaptions& data, nn::Optimizer& optimizer,
                          const CaptionTrainConfig& config, int epoch) {
  const lm::TrainConfig& base = config.base;
  nn::Rng dropout_rng(nn::derive_seed(base.seed, "capgen-dropout", {epoch}));
  const auto batches = lm::make_minibatches(data.examples.size(), base.minibatch_size,
                                            nn::derive_seed(base.seed, "capgen-shuffle", {epoch}));
  const CaptionDropout dropout = config.dropout();
  double loss_sum = 0.0;
  std::size_t positions = 0;
  for (const auto& ids : batches) {
    std::vector<const std::vector<int>*> members;
    nn::Matrix images(static_cast<Eigen::Index>(ids.size()), data.images.cols());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const CaptionExample& ex = data.examples[ids[k]];
      members.push_back(&ex.encoded);
      images.row(static_cast<Eigen::Index>(k)) = data.images.row(static_cast<Eigen::Index>(ex.image));
    }
    const lm::SequenceBatch batch = lm::SequenceBatch::build(members);
    model.params().zero_grads();
    nn::Graph g(&model.params());
    nn::Var total = model.loss(g, batch, images, dropout, &dropout_rng);
    loss_sum += g.scalar(total);
    positions += batch.positions();
    g.backward(g.scale(total, 1.0 / static_cast<double>(batch.batch)));
    nn::clip_by_global_norm(model.params(), base.optimizer.max_grad_norm);
    optimizer.step(model.params());
  }
  return positions ? loss_sum / static_cast<double>(positions) : 0.0;
}

lm::TrainHistory train_capgen(CaptionGenerator& model, const text::CaptionDataset& dataset,
                              const text::FeatureStore& features, const CaptionTrainConfig& config,
                              const lm::EpochCallback& on_epoch) {
  config.validate();
  const auto train_items = dataset.items_in(text::Split::kTrain);
  const auto val_items = dataset.items_in(text::Split::kVal);
  if (train_items.empty()) throw DataError("caption dataset has no training items");
  if (val_items.empty() && config.base.early_stopping) throw DataError("caption dataset has no validation items");
  const EncodedCaptions data = encode_captions(model, train_items, features);

  nn::Optimizer optimizer(config.base.optimizer);
  optimizer.init(model.params());
  std::map<std::string, nn::Tensor> best;

  lm::EpochHooks hooks;
  hooks.train_epoch = [&](int epoch) { return train_capgen_epoch(model, data, optimizer, config, epoch); };
  hooks.validate = [&] { return val_items.empty() ? 0.0 : caption_perplexity(model, val_items, features); };
  hooks.snapshot = [&] { best = model.params().snapshot(); };
  hooks.restore = [&] { model.params().restore(best); };
  hooks.on_epoch = on_epoch;
  return lm::run_training_loop(config.base.max_epochs, config.base.early_stopping, hooks);
}

}  // namespace captrans::capgen
