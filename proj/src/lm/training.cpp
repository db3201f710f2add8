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

#include "captrans/lm/training.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "captrans/errors.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::lm {

void TrainConfig::validate() const {
  optimizer.validate();
  for (double r : {embedding_dropout, rnn_dropout}) {
    if (r < 0.0 || r > 0.5) throw ConfigError("dropout rate must be in [0, 0.5]");
  }
  if (minibatch_size < 10 || minibatch_size > 300) {
    throw ConfigError("minibatch size must be in [10, 300], got " + std::to_string(minibatch_size));
  }
  if (max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
}

void TrainHistory::write_csv(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << "epoch,train_loss,val_perplexity,wall_seconds\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f\n", e.epoch, e.train_loss, e.val_perplexity,
                  e.wall_seconds);
    out << buf;
  }
}

nlohmann::json TrainHistory::to_json() const {
  nlohmann::json j;
  j["stopped_at"] = stopped_at;
  j["selected_epoch"] = selected_epoch;
  j["early_stopped"] = early_stopped;
  nlohmann::json v = nlohmann::json::array();
  for (const auto& e : epochs) v.push_back(e.val_perplexity);
  j["val_perplexity"] = v;
  return j;
}

TrainHistory run_training_loop(int max_epochs, bool early_stopping, const EpochHooks& hooks) {
  TrainHistory history;
  double previous = 0.0;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = hooks.train_epoch(epoch);
    rec.val_perplexity = hooks.validate();
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.epochs.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    history.stopped_at = epoch;
    if (early_stopping && epoch > 1 && rec.val_perplexity > previous) {
      hooks.restore();
      history.early_stopped = true;
      history.selected_epoch = epoch - 1;
      return history;
    }
    if (early_stopping) hooks.snapshot();
    history.selected_epoch = epoch;
    previous = rec.val_perplexity;
  }
  return history;
}

std::vector<std::vector<std::size_t>> make_minibatches(std::size_t n, std::size_t batch_size,
                                                       std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + batch_size)));
  }
  return batches;
}

}  // namespace captrans::lm
