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

#include "captrans/runner/hyperparams.hpp"

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::runner {
namespace {

// Category values may be written as JSON booleans or strings.
bool read_flag(const nlohmann::json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_boolean()) return v.get<bool>();
  const std::string s = v.get<std::string>();
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(std::string(key) + " must be true or false");
}

nn::InitSpec read_init(const nlohmann::json& j, std::uint64_t seed) {
  nn::InitSpec init;
  if (j.contains("init_method")) init.method = nn::parse_init_method(j.at("init_method").get<std::string>());
  init.max_abs = j.value("max_init_weight", init.max_abs);
  init.seed = seed;
  init.validate();
  return init;
}

lm::TrainConfig read_train(const nlohmann::json& j, std::uint64_t seed) {
  lm::TrainConfig t;
  if (j.contains("optimizer")) t.optimizer.kind = nn::parse_optimizer(j.at("optimizer").get<std::string>());
  t.optimizer.learning_rate = j.value("learning_rate", t.optimizer.learning_rate);
  t.optimizer.weight_decay = j.value("weight_decay", t.optimizer.weight_decay);
  t.optimizer.max_grad_norm = j.value("max_grad_norm", t.optimizer.max_grad_norm);
  t.minibatch_size = j.value("minibatch_size", t.minibatch_size);
  t.embedding_dropout = j.value("embedding_dropout", t.embedding_dropout);
  t.rnn_dropout = j.value("rnn_dropout", t.rnn_dropout);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.early_stopping = j.value("early_stopping", t.early_stopping);
  t.seed = seed;
  t.validate();
  return t;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + " hyperparameters: " + e.what());
  }
}

}  // namespace

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("hyperparameter file must hold a JSON object");
  Hyperparams h;
  if (j.contains("lm")) h.lm = j.at("lm");
  if (j.contains("capgen")) h.capgen = j.at("capgen");
  return h;
}

Hyperparams Hyperparams::load(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw ConfigError("hyperparameter file " + file.string() + " not found");
  try {
    return from_json(nn::read_json_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

nlohmann::json Hyperparams::to_json() const {
  nlohmann::json j = {{"capgen", capgen}};
  if (lm) j["lm"] = *lm;
  return j;
}

LmSettings lm_settings(const nlohmann::json& j, std::uint64_t seed) {
  return guarded("language model", [&] {
    LmSettings s;
    s.embed_size = j.value("embed_size", s.embed_size);
    s.rnn_size = j.value("rnn_size", s.rnn_size);
    s.init = read_init(j, nn::derive_seed(seed, "lm-init"));
    s.train = read_train(j, nn::derive_seed(seed, "lm-train"));
    if (s.embed_size == 0 || s.rnn_size == 0) throw ConfigError("layer sizes must be positive");
    return s;
  });
}

CapgenSettings capgen_settings(const nlohmann::json& j, std::uint64_t seed) {
  return guarded("caption generator", [&] {
    CapgenSettings s;
    s.embed_size = j.value("embed_size", s.embed_size);
    s.rnn_size = j.value("rnn_size", s.rnn_size);
    s.post_image_size = j.value("post_image_size", s.post_image_size);
    if (j.contains("post_image_activation")) {
      s.post_image_activation = nn::parse_activation(j.at("post_image_activation").get<std::string>());
    }
    s.normalize_image = read_flag(j, "normalize_image", s.normalize_image);
    s.init = read_init(j, nn::derive_seed(seed, "capgen-init"));
    s.train.base = read_train(j, nn::derive_seed(seed, "capgen-train"));
    s.train.image_dropout = j.value("image_dropout", s.train.image_dropout);
    s.train.post_image_dropout = j.value("post_image_dropout", s.train.post_image_dropout);
    s.train.validate();
    s.generation.beam_width = j.value("beam_width", s.generation.beam_width);
    s.generation.max_length = j.value("max_length", s.generation.max_length);
    s.generation.validate();
    if (s.embed_size == 0 || s.rnn_size == 0 || s.post_image_size == 0) {
      throw ConfigError("layer sizes must be positive");
    }
    return s;
  });
}

nlohmann::json merge_point(const nlohmann::json& base, const hyperopt::HyperPoint& point) {
  nlohmann::json j = base.is_object() ? base : nlohmann::json::object();
  const nlohmann::json values = hyperopt::point_to_json(point);
  for (const auto& [k, v] : values.items()) j[k] = v;
  return j;
}

}  // namespace captrans::runner
