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

#include <vector>

#include "captrans/capgen/caption_generator.hpp"
#include "captrans/lm/perplexity.hpp"
#include "captrans/lm/training.hpp"
#include "captrans/text/dataset.hpp"

namespace captrans::capgen {

struct CaptionTrainConfig {
  /// Optimiser, minibatch, epochs and the embedding/RNN dropout rates.
  lm::TrainConfig base;
  double image_dropout = 0.0;
  double post_image_dropout = 0.0;

  void validate() const;
  CaptionDropout dropout() const;
};

/// One (image, caption) training pair, encoded against the model vocabulary.
struct CaptionExample {
  std::size_t image = 0;  // row of the prepared image matrix
  std::vector<int> encoded;
};

/// Prepared image rows and all caption pairs of `items`.
struct EncodedCaptions {
  nn::Matrix images;
  std::vector<CaptionExample> examples;
};

/// Looks up every item's features (DataError when one is missing) and encodes
/// its captions.
EncodedCaptions encode_captions(const CaptionGenerator& model, std::span<const text::CaptionItem* const> items,
                                const text::FeatureStore& features);

/// Scores every caption of `items` under its own image.
std::vector<lm::ScoredSentence> score_captions(const CaptionGenerator& model,
                                               std::span<const text::CaptionItem* const> items,
                                               const text::FeatureStore& features);

/// Per-token perplexity of the captions of `items`.
double caption_perplexity(const CaptionGenerator& model, std::span<const text::CaptionItem* const> items,
                          const text::FeatureStore& features,
                          lm::PerplexityMode mode = lm::PerplexityMode::kToken);

double train_capgen_epoch(CaptionGenerator& model, const EncodedCaptions& data, nn::Optimizer& optimizer,
                          const CaptionTrainConfig& config, int epoch);

/// Trains on the train split and early-stops on the validation split, using
/// the same loop as the language model. Non-trainable (frozen) parameters are
/// never updated.
lm::TrainHistory train_capgen(CaptionGenerator& model, const text::CaptionDataset& dataset,
                              const text::FeatureStore& features, const CaptionTrainConfig& config,
                              const lm::EpochCallback& on_epoch = {});

}  // namespace captrans::capgen
