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
#include <optional>

#include "json.hpp"
#include "captrans/capgen/caption_generator.hpp"
#include "captrans/capgen/train.hpp"
#include "captrans/hyperopt/space.hpp"
#include "captrans/lm/training.hpp"

namespace captrans::runner {

struct LmSettings {
  std::size_t embed_size = 64;
  std::size_t rnn_size = 64;
  nn::InitSpec init;
  lm::TrainConfig train;
};

struct CapgenSettings {
  /// Used only without transfer; a transferred model takes the LM's sizes.
  std::size_t embed_size = 64;
  std::size_t rnn_size = 64;
  std::size_t post_image_size = 64;
  nn::Activation post_image_activation = nn::Activation::kRelu;
  bool normalize_image = false;
  nn::InitSpec init;
  capgen::CaptionTrainConfig train;
  capgen::GenerationConfig generation;
};

/// A hyperparameter file holds an optional "lm" object and a "capgen" object
/// whose keys are the search-space names (init_method, max_init_weight,
/// embed_size, rnn_size, optimizer, learning_rate, weight_decay,
/// max_grad_norm, minibatch_size, embedding_dropout, rnn_dropout,
/// post_image_size, post_image_activation, normalize_image, image_dropout,
/// post_image_dropout, beam_width) plus "max_epochs". Missing keys keep their
/// defaults. Seeds are not part of the file; they come from the trial.
struct Hyperparams {
  std::optional<nlohmann::json> lm;
  nlohmann::json capgen = nlohmann::json::object();

  static Hyperparams load(const std::filesystem::path& file);
  static Hyperparams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

LmSettings lm_settings(const nlohmann::json& j, std::uint64_t seed);
CapgenSettings capgen_settings(const nlohmann::json& j, std::uint64_t seed);

/// A tuner point as a settings object (the point's keys overwrite `base`).
nlohmann::json merge_point(const nlohmann::json& base, const hyperopt::HyperPoint& point);

}  // namespace captrans::runner
