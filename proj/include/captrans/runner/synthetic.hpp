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

#include <cstdint>
#include <filesystem>

#include "captrans/metrics/wmd.hpp"
#include "captrans/text/corpus.hpp"
#include "captrans/text/dataset.hpp"

namespace captrans::runner {

/// Templated captioning task. Each image has a colour, an object, an action
/// and a place; its feature vector is the sum of one random prototype per
/// attribute plus Gaussian noise, and its captions mention the attributes
/// through several templates with filler words. Two extra text corpora
/// stand in for an out-of-dataset caption corpus and for general text.
struct SyntheticConfig {
  std::size_t items = 500;
  std::size_t val_items = 50;
  std::size_t test_items = 50;
  std::size_t captions_per_item = 5;
  std::size_t feature_dim = 64;
  double feature_noise = 0.5;
  std::size_t text_sentences = 20000;  // training sentences per extra corpus
  std::size_t text_val_sentences = 500;
  std::size_t embedding_dim = 16;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticTask {
  text::CaptionDataset dataset;
  text::FeatureStore features;
  text::Corpus different_train, different_val;
  text::Corpus general_train, general_val;
  /// Clustered word vectors (one cluster per word class) for WMD.
  metrics::WordEmbeddingTable embeddings;
};

SyntheticTask make_synthetic_task(const SyntheticConfig& config);

/// Writes captions.jsonl, features.bin, embeddings.bin, corpora/*.txt and a
/// desk-scale experiment.json with hyperparams/*.json next to it.
void write_synthetic_task(const SyntheticTask& task, const SyntheticConfig& config,
                          const std::filesystem::path& dir);

}  // namespace captrans::runner
