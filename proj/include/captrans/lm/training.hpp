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
#include <functional>
#include <vector>

#include "json.hpp"

#include "captrans/nn/optimizer.hpp"

namespace captrans::lm {

struct TrainConfig {
  nn::OptimizerConfig optimizer;
  double embedding_dropout = 0.0;
  double rnn_dropout = 0.0;
  std::size_t minibatch_size = 50;
  int max_epochs = 20;
  bool early_stopping = true;
  std::uint64_t seed = 0;

  /// Dropout in [0, 0.5], minibatch in [10, 300], max_epochs >= 0, optimizer ranges.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean cross-entropy per predicted position
  double val_perplexity = 0.0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  /// Last epoch that ran (0 if none).
  int stopped_at = 0;
  /// Epoch whose weights the model holds afterwards (0 = untrained).
  int selected_epoch = 0;
  bool early_stopped = false;

  /// Columns: epoch, train_loss, val_perplexity, wall_seconds.
  void write_csv(const std::filesystem::path& file) const;
  nlohmann::json to_json() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Callbacks driven by run_training_loop.
struct EpochHooks {
  /// Trains one epoch (1-based) and returns its mean training loss.
  std::function<double(int epoch)> train_epoch;
  /// Validation perplexity of the current weights.
  std::function<double()> validate;
  /// Remembers the current weights as the rollback point.
  std::function<void()> snapshot;
  /// Restores the last snapshot.
  std::function<void()> restore;
  /// Optional; called with each completed epoch record.
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Epoch loop with the stopping rule: training stops at the first epoch whose
/// validation perplexity is worse than the previous epoch's, and the previous
/// epoch's weights are restored.
TrainHistory run_training_loop(int max_epochs, bool early_stopping, const EpochHooks& hooks);

/// Shuffled minibatch partition of [0, n).
std::vector<std::vector<std::size_t>> make_minibatches(std::size_t n, std::size_t batch_size,
                                                       std::uint64_t seed);

}  // namespace captrans::lm
