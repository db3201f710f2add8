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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "captrans/capgen/beam_search.hpp"
#include "captrans/lm/prefix_encoder.hpp"
#include "captrans/lm/training.hpp"
#include "captrans/nn/layers.hpp"
#include "captrans/text/vocabulary.hpp"

namespace captrans::capgen {

inline const std::string kPostImageWeight = "post_image.w";
inline const std::string kPostImageBias = "post_image.b";
inline const std::string kSoftmaxWeight = "softmax.w";
inline const std::string kSoftmaxBias = "softmax.b";

enum class TransferMode { kNone, kFrozen, kFineTuned };

std::string to_string(TransferMode m);
TransferMode parse_transfer_mode(const std::string& s);

struct CaptionModelConfig {
  std::size_t embed_size = 64;
  std::size_t rnn_size = 64;
  std::size_t feature_size = 4096;
  std::size_t post_image_size = 64;
  nn::Activation post_image_activation = nn::Activation::kRelu;
  bool normalize_image = false;
  nn::InitSpec init;
};

struct CaptionDropout {
  double image = 0.0;
  double post_image = 0.0;
  double embedding = 0.0;
  double rnn = 0.0;
};

/// Where the prefix encoder came from, written as transfer.json.
struct TransferRecord {
  TransferMode mode = TransferMode::kNone;
  std::string source_hash;
};

/// Merge-architecture caption generator: the GRU encodes the caption prefix,
/// the image is projected separately, and the softmax reads
/// [prefix state || post image].
class CaptionGenerator {
 public:
  static CaptionGenerator create(text::Vocabulary vocab, const CaptionModelConfig& config);

  const text::Vocabulary& vocab() const { return vocab_; }
  const CaptionModelConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const TransferRecord& transfer() const { return transfer_; }
  void set_transfer(TransferRecord r) { transfer_ = std::move(r); }

  /// Optional L2 normalisation of raw features. A zero vector cannot be
  /// normalised; it is returned as-is and `zero_norm` is set.
  nn::RowVector prepare_image(std::span<const float> features, bool* zero_norm = nullptr) const;
  /// Post-image vector: dense(prepared features) with the configured activation.
  nn::RowVector project_image(std::span<const float> features, bool* zero_norm = nullptr) const;

  /// Summed cross-entropy of a batch. `images` holds one prepared feature row
  /// per sentence of the batch. Dropout applies only when `rng` is non-null.
  nn::Var loss(nn::Graph& g, const lm::SequenceBatch& batch, const nn::Matrix& images,
               const CaptionDropout& dropout, nn::Rng* rng) const;

  std::vector<double> next_distribution(std::span<const float> features, std::span<const int> prefix) const;
  /// log p of each next token of `encoded` (which starts with EDGE).
  std::vector<double> token_log_probs(std::span<const float> features, std::span<const int> encoded) const;

  void save(const std::filesystem::path& dir) const;
  static CaptionGenerator load(const std::filesystem::path& dir);

 private:
  CaptionGenerator() = default;

  text::Vocabulary vocab_;
  CaptionModelConfig config_;
  nn::ParamStore params_;
  TransferRecord transfer_;
};

/// Step model over one image for beam search.
class CaptionDecoder {
 public:
  using State = nn::RowVector;

  CaptionDecoder(const CaptionGenerator& model, std::span<const float> features);

  State start() const;
  State advance(const State& h, int token) const { return encoder_.step(h, token); }
  std::vector<double> log_probs(const State& h) const;

 private:
  lm::PrefixEncoder encoder_;
  nn::Matrix w_prefix_;
  nn::RowVector image_term_;  // post_image * W_image + b
};

Hypothesis generate_caption(const CaptionGenerator& model, std::span<const float> features,
                            const GenerationConfig& config);

}  // namespace captrans::capgen
