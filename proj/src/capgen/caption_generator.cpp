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

#include "captrans/capgen/caption_generator.hpp"

#include <cmath>

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::capgen {

std::string to_string(TransferMode m) {
  switch (m) {
    case TransferMode::kNone: return "none";
    case TransferMode::kFrozen: return "frozen";
    case TransferMode::kFineTuned: return "fine-tuned";
  }
  return "none";
}

TransferMode parse_transfer_mode(const std::string& s) {
  if (s == "none") return TransferMode::kNone;
  if (s == "frozen") return TransferMode::kFrozen;
  if (s == "fine-tuned" || s == "finetuned" || s == "fine_tuned") return TransferMode::kFineTuned;
  throw ConfigError("unknown transfer mode '" + s + "' (expected none, frozen or fine-tuned)");
}

CaptionGenerator CaptionGenerator::create(text::Vocabulary vocab, const CaptionModelConfig& config) {
  if (config.embed_size == 0 || config.rnn_size == 0 || config.post_image_size == 0 ||
      config.feature_size == 0) {
    throw ConfigError("layer sizes must be positive");
  }
  config.init.validate();
  CaptionGenerator m;
  m.vocab_ = std::move(vocab);
  m.config_ = config;
  const std::size_t v = m.vocab_.size();
  lm::add_prefix_params(m.params_, v, config.embed_size, config.rnn_size, config.init);
  nn::InitSpec spec = config.init;
  spec.seed = nn::derive_seed(config.init.seed, kPostImageWeight);
  m.params_.add(kPostImageWeight, nn::init_tensor({config.feature_size, config.post_image_size}, spec));
  m.params_.add(kPostImageBias, nn::Tensor({config.post_image_size}));
  spec.seed = nn::derive_seed(config.init.seed, kSoftmaxWeight);
  m.params_.add(kSoftmaxWeight, nn::init_tensor({config.rnn_size + config.post_image_size, v}, spec));
  m.params_.add(kSoftmaxBias, nn::Tensor({v}));
  return m;
}

nn::RowVector CaptionGenerator::prepare_image(std::span<const float> features, bool* zero_norm) const {
  if (features.size() != config_.feature_size) {
    throw ShapeError("image feature vector has " + std::to_string(features.size()) +
                     " elements, expected " + std::to_string(config_.feature_size));
  }
  nn::RowVector x(static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) x(static_cast<Eigen::Index>(i)) = features[i];
  if (zero_norm) *zero_norm = false;
  if (config_.normalize_image) {
    const double norm = x.norm();
    if (norm > 0.0) {
      x /= norm;
    } else if (zero_norm) {
      *zero_norm = true;
    }
  }
  return x;
}

nn::RowVector CaptionGenerator::project_image(std::span<const float> features, bool* zero_norm) const {
  const nn::RowVector x = prepare_image(features, zero_norm);
  return nn::dense(x, nn::to_matrix(params_.value(kPostImageWeight)),
                   nn::to_matrix(params_.value(kPostImageBias)), config_.post_image_activation);
}

nn::Var CaptionGenerator::loss(nn::Graph& g, const lm::SequenceBatch& batch, const nn::Matrix& images,
                               const CaptionDropout& dropout, nn::Rng* rng) const {
  if (static_cast<std::size_t>(images.rows()) != batch.batch) {
    throw ShapeError("one image row is required per sentence in the batch");
  }
  nn::Var img = g.constant(images);
  if (rng) img = g.dropout(img, dropout.image, *rng);
  nn::Var post = nn::dense(g, img, g.param(kPostImageWeight), g.param(kPostImageBias),
                           config_.post_image_activation);
  if (rng) post = g.dropout(post, dropout.post_image, *rng);
  std::vector<nn::Var> states = lm::encode_prefixes(g, batch, dropout.embedding, rng);
  nn::Var h = g.stack_rows(states);
  if (rng) h = g.dropout(h, dropout.rnn, *rng);
  nn::Var merged = g.concat_cols(h, g.tile_rows(post, batch.steps));
  nn::Var logits = g.add_row(g.matmul(merged, g.param(kSoftmaxWeight)), g.param(kSoftmaxBias));
  return g.softmax_cross_entropy(logits, batch.targets, batch.weights);
}

CaptionDecoder::CaptionDecoder(const CaptionGenerator& model, std::span<const float> features)
    : encoder_(model.params()) {
  const nn::Matrix w = nn::to_matrix(model.params().value(kSoftmaxWeight));
  const auto h = static_cast<Eigen::Index>(model.config().rnn_size);
  w_prefix_ = w.topRows(h);
  const nn::RowVector post = model.project_image(features);
  image_term_ = post * w.bottomRows(w.rows() - h) + nn::to_matrix(model.params().value(kSoftmaxBias));
}

CaptionDecoder::State CaptionDecoder::start() const {
  return encoder_.step(encoder_.initial_state(), text::Vocabulary::kEdge);
}

std::vector<double> CaptionDecoder::log_probs(const State& h) const {
  const nn::RowVector z = h * w_prefix_ + image_term_;
  return nn::log_softmax(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

namespace {
void check_prefix(std::span<const int> prefix, std::size_t vocab_size) {
  if (prefix.empty() || prefix[0] != text::Vocabulary::kEdge) {
    throw IndexError("prefix must start with the boundary token");
  }
  for (int t : prefix) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size) {
      throw IndexError("token index " + std::to_string(t) + " out of range");
    }
  }
}
}  // namespace

std::vector<double> CaptionGenerator::next_distribution(std::span<const float> features,
                                                        std::span<const int> prefix) const {
  check_prefix(prefix, vocab_.size());
  CaptionDecoder dec(*this, features);
  auto h = dec.start();
  for (std::size_t i = 1; i < prefix.size(); ++i) h = dec.advance(h, prefix[i]);
  auto lp = dec.log_probs(h);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

std::vector<double> CaptionGenerator::token_log_probs(std::span<const float> features,
                                                      std::span<const int> encoded) const {
  check_prefix(encoded, vocab_.size());
  CaptionDecoder dec(*this, features);
  std::vector<double> out;
  out.reserve(encoded.size() - 1);
  auto h = dec.start();
  for (std::size_t i = 1; i < encoded.size(); ++i) {
    out.push_back(dec.log_probs(h)[static_cast<std::size_t>(encoded[i])]);
    if (i + 1 < encoded.size()) h = dec.advance(h, encoded[i]);
  }
  return out;
}

void CaptionGenerator::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  vocab_.save(dir / "vocab.json");
  nlohmann::json config = {
      {"kind", "caption_generator"},
      {"embed_size", config_.embed_size},
      {"rnn_size", config_.rnn_size},
      {"feature_size", config_.feature_size},
      {"post_image_size", config_.post_image_size},
      {"post_image_activation", nn::to_string(config_.post_image_activation)},
      {"normalize_image", config_.normalize_image},
      {"vocab_size", vocab_.size()},
      {"vocab", "vocab.json"},
      {"init",
       {{"method", nn::to_string(config_.init.method)}, {"max_abs", config_.init.max_abs}, {"seed", config_.init.seed}}},
  };
  nn::write_checkpoint(dir, params_, config);
  nn::write_json_file(dir / "transfer.json",
                      {{"mode", to_string(transfer_.mode)}, {"source_hash", transfer_.source_hash}});
}

CaptionGenerator CaptionGenerator::load(const std::filesystem::path& dir) {
  nn::Checkpoint ckpt = nn::read_checkpoint(dir);
  const auto& c = ckpt.config;
  if (c.value("kind", "") != "caption_generator") {
    throw DataError(dir.string() + " is not a caption generator checkpoint");
  }
  CaptionGenerator m;
  m.vocab_ = text::Vocabulary::load(dir / c.value("vocab", "vocab.json"));
  m.config_.embed_size = c.at("embed_size").get<std::size_t>();
  m.config_.rnn_size = c.at("rnn_size").get<std::size_t>();
  m.config_.feature_size = c.at("feature_size").get<std::size_t>();
  m.config_.post_image_size = c.at("post_image_size").get<std::size_t>();
  m.config_.post_image_activation = nn::parse_activation(c.at("post_image_activation").get<std::string>());
  m.config_.normalize_image = c.at("normalize_image").get<bool>();
  m.config_.init.method = nn::parse_init_method(c.at("init").at("method").get<std::string>());
  m.config_.init.max_abs = c.at("init").at("max_abs").get<double>();
  m.config_.init.seed = c.at("init").at("seed").get<std::uint64_t>();
  m.params_ = std::move(ckpt.params);
  if (std::filesystem::exists(dir / "transfer.json")) {
    const auto t = nn::read_json_file(dir / "transfer.json");
    m.transfer_.mode = parse_transfer_mode(t.value("mode", "none"));
    m.transfer_.source_hash = t.value("source_hash", "");
  }
  const auto& sw = m.params_.value(kSoftmaxWeight);
  if (sw.shape() != nn::Shape{m.config_.rnn_size + m.config_.post_image_size, m.vocab_.size()} ||
      m.params_.value(kPostImageWeight).shape() != nn::Shape{m.config_.feature_size, m.config_.post_image_size} ||
      m.params_.value(lm::kEmbeddingParam).shape() != nn::Shape{m.vocab_.size(), m.config_.embed_size}) {
    throw ShapeError("caption generator parameters are inconsistent with its configuration");
  }
  return m;
}

Hypothesis generate_caption(const CaptionGenerator& model, std::span<const float> features,
                            const GenerationConfig& config) {
  CaptionDecoder dec(model, features);
  return beam_search(dec, config, text::Vocabulary::kEdge);
}

}  // namespace captrans::capgen
