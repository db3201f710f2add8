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

#include "captrans/lm/language_model.hpp"

#include "captrans/errors.hpp"
#include "captrans/lm/perplexity.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::lm {

LanguageModel LanguageModel::create(text::Vocabulary vocab, std::size_t embed_size,
                                    std::size_t rnn_size, const nn::InitSpec& init) {
  if (embed_size == 0 || rnn_size == 0) throw ConfigError("layer sizes must be positive");
  init.validate();
  LanguageModel m;
  m.vocab_ = std::move(vocab);
  m.embed_size_ = embed_size;
  m.rnn_size_ = rnn_size;
  m.init_ = init;
  add_prefix_params(m.params_, m.vocab_.size(), embed_size, rnn_size, init);
  nn::InitSpec out = init;
  out.seed = nn::derive_seed(init.seed, kLmSoftmaxWeight);
  m.params_.add(kLmSoftmaxWeight, nn::init_tensor({rnn_size, m.vocab_.size()}, out));
  m.params_.add(kLmSoftmaxBias, nn::Tensor({m.vocab_.size()}));
  return m;
}

void LanguageModel::check_dims() const {
  const auto& emb = params_.value(kEmbeddingParam);
  const auto& w = params_.value(kLmSoftmaxWeight);
  if (emb.shape() != nn::Shape{vocab_.size(), embed_size_} ||
      w.shape() != nn::Shape{rnn_size_, vocab_.size()} ||
      params_.value(kGruPrefix + ".u_z").shape() != nn::Shape{rnn_size_, rnn_size_} ||
      params_.value(kGruPrefix + ".w_z").shape() != nn::Shape{embed_size_, rnn_size_}) {
    throw ShapeError("language model parameters are inconsistent with its dimensions");
  }
}

nn::Var LanguageModel::loss(nn::Graph& g, const SequenceBatch& batch, double embedding_dropout,
                            double rnn_dropout, nn::Rng* rng) const {
  std::vector<nn::Var> states = encode_prefixes(g, batch, embedding_dropout, rng);
  nn::Var h = g.stack_rows(states);
  if (rng != nullptr) h = g.dropout(h, rnn_dropout, *rng);
  nn::Var logits = g.add_row(g.matmul(h, g.param(kLmSoftmaxWeight)), g.param(kLmSoftmaxBias));
  return g.softmax_cross_entropy(logits, batch.targets, batch.weights);
}

namespace {

std::vector<double> logits_of(const nn::RowVector& h, const nn::Matrix& w, const nn::RowVector& b) {
  nn::RowVector z = h * w + b;
  return std::vector<double>(z.data(), z.data() + z.size());
}

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

std::vector<double> LanguageModel::next_distribution(std::span<const int> prefix) const {
  check_prefix(prefix, vocab_.size());
  PrefixEncoder enc(params_);
  const nn::RowVector h = enc.encode(prefix);
  const nn::Matrix w = nn::to_matrix(params_.value(kLmSoftmaxWeight));
  const nn::RowVector b = nn::to_matrix(params_.value(kLmSoftmaxBias));
  return nn::softmax(logits_of(h, w, b));
}

std::vector<double> LanguageModel::token_log_probs(std::span<const int> encoded) const {
  check_prefix(encoded, vocab_.size());
  PrefixEncoder enc(params_);
  const nn::Matrix w = nn::to_matrix(params_.value(kLmSoftmaxWeight));
  const nn::RowVector b = nn::to_matrix(params_.value(kLmSoftmaxBias));
  std::vector<double> out;
  out.reserve(encoded.size() - 1);
  nn::RowVector h = enc.initial_state();
  for (std::size_t i = 0; i + 1 < encoded.size(); ++i) {
    h = enc.step(h, encoded[i]);
    out.push_back(nn::log_softmax(logits_of(h, w, b))[static_cast<std::size_t>(encoded[i + 1])]);
  }
  return out;
}

void LanguageModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  vocab_.save(dir / "vocab.json");
  nlohmann::json config = {
      {"kind", "language_model"},
      {"embed_size", embed_size_},
      {"rnn_size", rnn_size_},
      {"vocab_size", vocab_.size()},
      {"vocab", "vocab.json"},
      {"init", {{"method", nn::to_string(init_.method)}, {"max_abs", init_.max_abs}, {"seed", init_.seed}}},
  };
  nn::write_checkpoint(dir, params_, config);
}

LanguageModel LanguageModel::load(const std::filesystem::path& dir) {
  nn::Checkpoint ckpt = nn::read_checkpoint(dir);
  const auto& c = ckpt.config;
  if (c.value("kind", "") != "language_model") throw DataError(dir.string() + " is not a language model checkpoint");
  LanguageModel m;
  m.vocab_ = text::Vocabulary::load(dir / c.value("vocab", "vocab.json"));
  m.embed_size_ = c.at("embed_size").get<std::size_t>();
  m.rnn_size_ = c.at("rnn_size").get<std::size_t>();
  m.init_.method = nn::parse_init_method(c.at("init").at("method").get<std::string>());
  m.init_.max_abs = c.at("init").at("max_abs").get<double>();
  m.init_.seed = c.at("init").at("seed").get<std::uint64_t>();
  m.params_ = std::move(ckpt.params);
  m.check_dims();
  return m;
}

double train_lm_epoch(LanguageModel& model, const std::vector<std::vector<int>>& encoded,
                      nn::Optimizer& optimizer, const TrainConfig& config, int epoch) {
  nn::Rng dropout_rng(nn::derive_seed(config.seed, "lm-dropout", {epoch}));
  const auto batches = make_minibatches(encoded.size(), config.minibatch_size,
                                        nn::derive_seed(config.seed, "lm-shuffle", {epoch}));
  double loss_sum = 0.0;
  std::size_t positions = 0;
  for (const auto& ids : batches) {
    std::vector<const std::vector<int>*> members;
    members.reserve(ids.size());
    for (std::size_t i : ids) members.push_back(&encoded[i]);
    const SequenceBatch batch = SequenceBatch::build(members);
    model.params().zero_grads();
    nn::Graph g(&model.params());
    nn::Var total = model.loss(g, batch, config.embedding_dropout, config.rnn_dropout, &dropout_rng);
    loss_sum += g.scalar(total);
    positions += batch.positions();
    // Summed over positions, averaged over sentences.
    g.backward(g.scale(total, 1.0 / static_cast<double>(batch.batch)));
    nn::clip_by_global_norm(model.params(), config.optimizer.max_grad_norm);
    optimizer.step(model.params());
  }
  return positions ? loss_sum / static_cast<double>(positions) : 0.0;
}

TrainHistory train_lm(LanguageModel& model, const text::Corpus& train, const text::Corpus& val,
                      const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty()) throw DataError("language model training corpus is empty");
  if (val.empty() && config.early_stopping) throw DataError("validation corpus is empty");
  std::vector<std::vector<int>> encoded;
  encoded.reserve(train.size());
  for (const auto& s : train.sentences) encoded.push_back(text::encode_sentence(s, model.vocab()));

  nn::Optimizer optimizer(config.optimizer);
  optimizer.init(model.params());
  std::map<std::string, nn::Tensor> best;

  EpochHooks hooks;
  hooks.train_epoch = [&](int epoch) {
    return train_lm_epoch(model, encoded, optimizer, config, epoch);
  };
  hooks.validate = [&] { return val.empty() ? 0.0 : perplexity_geometric(model, val); };
  hooks.snapshot = [&] { best = model.params().snapshot(); };
  hooks.restore = [&] { model.params().restore(best); };
  hooks.on_epoch = on_epoch;
  return run_training_loop(config.max_epochs, config.early_stopping, hooks);
}

}  // namespace captrans::lm
