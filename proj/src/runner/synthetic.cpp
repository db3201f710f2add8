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

#include "captrans/runner/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::runner {
namespace {

using Words = std::vector<std::string>;

const Words kColours = {"red", "blue", "green", "yellow", "black", "white", "brown", "orange"};
const Words kObjects = {"dog", "cat", "horse", "bird", "boy", "girl", "man", "woman", "car", "ball"};
const Words kActions = {"running", "jumping", "sitting", "sleeping", "playing", "standing", "walking", "swimming"};
const Words kPlaces = {"park", "beach", "street", "field", "garden", "river", "snow", "road"};
const Words kFillers = {"small", "big", "happy", "young", "old", "little"};

// Extra words that only the other caption corpus uses.
const Words kOtherObjects = {"plate", "table", "train", "bus", "tree", "building", "kite", "pizza"};
const Words kOtherPlaces = {"kitchen", "city", "station", "room", "market", "airport"};

const Words kNewsSubjects = {"the government", "the company", "the minister", "the council", "the bank",
                             "the market", "the police", "the court", "officials", "investors"};
const Words kNewsVerbs = {"said", "announced", "reported", "denied", "confirmed", "expected", "warned"};
const Words kNewsObjects = {"new taxes", "higher prices", "the deal", "a plan", "the report", "job cuts",
                            "the election", "strong growth", "the decision", "a new law"};
const Words kNewsTails = {"on monday", "last week", "this year", "in the city", "after talks",
                          "despite concerns", "in a statement", "on the street"};

const std::string& pick(const Words& w, nn::Rng& rng) { return w[rng.below(w.size())]; }

std::string maybe_filler(nn::Rng& rng) { return rng.bernoulli(0.3) ? pick(kFillers, rng) + " " : ""; }

std::string caption(std::size_t c, std::size_t o, std::size_t a, std::size_t p, nn::Rng& rng) {
  const std::string& col = kColours[c];
  const std::string& obj = kObjects[o];
  const std::string& act = kActions[a];
  const std::string& pl = kPlaces[p];
  switch (rng.below(6)) {
    case 0: return "a " + maybe_filler(rng) + col + " " + obj + " is " + act + " in the " + pl;
    case 1: return "the " + maybe_filler(rng) + obj + " is " + act + " near the " + pl;
    case 2: return "there is a " + col + " " + obj + " " + act + " in a " + pl;
    case 3: return col + " " + obj + " " + act;
    case 4: return "a " + obj + " " + act + " on the " + pl;
    default: return "a " + maybe_filler(rng) + col + " " + obj + " in the " + pl;
  }
}

std::string other_caption(nn::Rng& rng) {
  const Words& objects = rng.bernoulli(0.5) ? kObjects : kOtherObjects;
  const Words& places = rng.bernoulli(0.5) ? kPlaces : kOtherPlaces;
  switch (rng.below(5)) {
    case 0: return "a " + pick(kColours, rng) + " " + pick(objects, rng) + " on a table";
    case 1: return "a " + pick(objects, rng) + " standing next to a " + pick(places, rng);
    case 2: return "two " + pick(objects, rng) + " " + pick(kActions, rng) + " in the " + pick(places, rng);
    case 3: return "the " + pick(objects, rng) + " is " + pick(kActions, rng) + " in a " + pick(places, rng);
    default: return "a view of a " + pick(places, rng) + " with a " + pick(objects, rng);
  }
}

std::string news_sentence(nn::Rng& rng) {
  std::string s = pick(kNewsSubjects, rng) + " " + pick(kNewsVerbs, rng) + " " + pick(kNewsObjects, rng) + " " +
                  pick(kNewsTails, rng);
  // Occasional caption words so the vocabularies overlap a little.
  if (rng.bernoulli(0.2)) s += " while a " + pick(kObjects, rng) + " was " + pick(kActions, rng);
  return s;
}

text::Corpus make_corpus(std::size_t n, std::string (*gen)(nn::Rng&), nn::Rng& rng, text::CorpusSource src) {
  text::Corpus c;
  c.source = src;
  for (std::size_t i = 0; i < n; ++i) c.sentences.push_back(text::split_tokens(gen(rng)));
  return c;
}

std::string item_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "img" + std::string(5 - std::min<std::size_t>(5, s.size()), '0') + s;
}

void write_text(const std::filesystem::path& file, const text::Corpus& c) { text::write_corpus(file, c); }

}  // namespace

void SyntheticConfig::validate() const {
  if (items == 0 || captions_per_item == 0 || feature_dim == 0 || embedding_dim == 0) {
    throw ConfigError("synthetic task sizes must be positive");
  }
  if (val_items + test_items >= items) throw ConfigError("synthetic task leaves no training items");
  if (!(feature_noise >= 0.0)) throw ConfigError("feature noise must be non-negative");
}

SyntheticTask make_synthetic_task(const SyntheticConfig& config) {
  config.validate();
  SyntheticTask task;
  const std::size_t f = config.feature_dim;

  // One prototype per attribute value, scaled so the clean vector has unit
  // expected squared norm per element.
  nn::Rng proto_rng(nn::derive_seed(config.seed, "synthetic-prototypes"));
  const double scale = 0.5;
  auto prototypes = [&](std::size_t n) {
    std::vector<std::vector<double>> out(n, std::vector<double>(f));
    for (auto& v : out) {
      for (double& x : v) x = scale * proto_rng.normal();
    }
    return out;
  };
  const auto pc = prototypes(kColours.size());
  const auto po = prototypes(kObjects.size());
  const auto pa = prototypes(kActions.size());
  const auto pp = prototypes(kPlaces.size());

  nn::Rng rng(nn::derive_seed(config.seed, "synthetic-items"));
  std::vector<float> data;
  std::map<std::string, std::size_t> index;
  const std::size_t n_train = config.items - config.val_items - config.test_items;
  for (std::size_t i = 0; i < config.items; ++i) {
    const std::size_t c = rng.below(kColours.size());
    const std::size_t o = rng.below(kObjects.size());
    const std::size_t a = rng.below(kActions.size());
    const std::size_t p = rng.below(kPlaces.size());
    text::CaptionItem item;
    item.image_id = item_id(i);
    item.split = i < n_train ? text::Split::kTrain
                             : (i < n_train + config.val_items ? text::Split::kVal : text::Split::kTest);
    for (std::size_t k = 0; k < config.captions_per_item; ++k) {
      item.captions.push_back(text::split_tokens(caption(c, o, a, p, rng)));
    }
    for (std::size_t d = 0; d < f; ++d) {
      const double v = pc[c][d] + po[o][d] + pa[a][d] + pp[p][d] + config.feature_noise * rng.normal();
      data.push_back(static_cast<float>(v));
    }
    index[item.image_id] = i;
    item.feature_row = i;
    task.dataset.items.push_back(std::move(item));
  }
  task.features = text::FeatureStore(f, std::move(data), std::move(index));

  nn::Rng text_rng(nn::derive_seed(config.seed, "synthetic-text"));
  task.different_train = make_corpus(config.text_sentences, other_caption, text_rng, text::CorpusSource::kDifferentCaptions);
  task.different_val = make_corpus(config.text_val_sentences, other_caption, text_rng, text::CorpusSource::kDifferentCaptions);
  task.general_train = make_corpus(config.text_sentences, news_sentence, text_rng, text::CorpusSource::kGeneralText);
  task.general_val = make_corpus(config.text_val_sentences, news_sentence, text_rng, text::CorpusSource::kGeneralText);

  // Word vectors: a centre per word class plus a small per-word offset.
  nn::Rng emb_rng(nn::derive_seed(config.seed, "synthetic-embeddings"));
  std::map<std::string, std::size_t> emb_index;
  std::vector<float> emb;
  auto add_class = [&](const std::vector<std::string>& words) {
    std::vector<double> centre(config.embedding_dim);
    for (double& x : centre) x = emb_rng.normal();
    for (const auto& w : words) {
      if (emb_index.count(w)) continue;
      emb_index[w] = emb_index.size();
      for (double x : centre) emb.push_back(static_cast<float>(x + 0.3 * emb_rng.normal()));
    }
  };
  add_class(kColours);
  add_class(kObjects);
  add_class(kActions);
  add_class(kPlaces);
  add_class(kFillers);
  add_class(kOtherObjects);
  add_class(kOtherPlaces);
  // Everything else (function words, news vocabulary) shares one loose class.
  std::set<std::string> rest;
  auto collect = [&](const text::Corpus& c) {
    for (const auto& s : c.sentences) {
      for (const auto& t : s) {
        if (!emb_index.count(t)) rest.insert(t);
      }
    }
  };
  collect(task.dataset.captions(text::Split::kTrain));
  collect(task.dataset.captions(text::Split::kVal));
  collect(task.dataset.captions(text::Split::kTest));
  collect(task.different_train);
  collect(task.general_train);
  add_class(std::vector<std::string>(rest.begin(), rest.end()));
  task.embeddings = metrics::WordEmbeddingTable(config.embedding_dim, std::move(emb), std::move(emb_index));
  return task;
}

void write_synthetic_task(const SyntheticTask& task, const SyntheticConfig& config, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "corpora");
  fs::create_directories(dir / "hyperparams");
  text::write_caption_dataset(dir / "captions.jsonl", task.dataset);
  task.features.write(dir / "features.bin");
  task.embeddings.write(dir / "embeddings.bin");
  write_text(dir / "corpora" / "different_train.txt", task.different_train);
  write_text(dir / "corpora" / "different_val.txt", task.different_val);
  write_text(dir / "corpora" / "general_train.txt", task.general_train);
  write_text(dir / "corpora" / "general_val.txt", task.general_val);

  const nlohmann::json lm = {
      {"init_method", "normal"}, {"max_init_weight", 0.3}, {"embed_size", 16}, {"rnn_size", 32},
      {"optimizer", "adam"},     {"learning_rate", 0.01},  {"weight_decay", 1e-8}, {"max_grad_norm", 5.0},
      {"minibatch_size", 50},    {"embedding_dropout", 0.0}, {"rnn_dropout", 0.0}, {"max_epochs", 30}};
  const nlohmann::json capgen = {
      {"init_method", "xavier"},    {"max_init_weight", 0.3},   {"embed_size", 16},
      {"rnn_size", 32},             {"post_image_size", 32},    {"post_image_activation", "relu"},
      {"normalize_image", false},   {"optimizer", "adam"},      {"learning_rate", 0.01},
      {"weight_decay", 1e-8},       {"max_grad_norm", 5.0},     {"minibatch_size", 50},
      {"embedding_dropout", 0.0},   {"rnn_dropout", 0.0},       {"image_dropout", 0.0},
      {"post_image_dropout", 0.0},  {"beam_width", 3},          {"max_epochs", 30}};
  nn::write_json_file(dir / "hyperparams" / "no-transfer.json", {{"capgen", capgen}});
  for (const char* row : {"same-captions", "different-captions", "general-text"}) {
    nn::write_json_file(dir / "hyperparams" / (std::string(row) + ".json"), {{"lm", lm}, {"capgen", capgen}});
  }

  const std::size_t train_captions = task.dataset.captions(text::Split::kTrain).size();
  const nlohmann::json experiment = {
      {"dataset", "captions.jsonl"},
      {"features", "features.bin"},
      {"embeddings", "embeddings.bin"},
      {"size_base", train_captions},
      {"min_count", 5},
      {"repeats", 5},
      {"seed", config.seed},
      {"rows",
       {{{"type", "no-transfer"}, {"hyperparams", "hyperparams/no-transfer.json"}, {"modes", {"fine-tuned"}}},
        {{"type", "same-captions"},
         {"hyperparams", "hyperparams/same-captions.json"},
         {"lm_corpus", {{"from_dataset", true}}},
         {"sizes", {-1.0, -0.5, 0.0}},
         {"modes", {"frozen", "fine-tuned"}}},
        {{"type", "different-captions"},
         {"hyperparams", "hyperparams/different-captions.json"},
         {"lm_corpus", {{"train", "corpora/different_train.txt"}, {"val", "corpora/different_val.txt"}}},
         {"sizes", {-1.0, -0.5, 0.0, 0.5, 1.0}},
         {"modes", {"frozen", "fine-tuned"}}},
        {{"type", "general-text"},
         {"hyperparams", "hyperparams/general-text.json"},
         {"lm_corpus", {{"train", "corpora/general_train.txt"}, {"val", "corpora/general_val.txt"}}},
         {"sizes", {-1.0, -0.5, 0.0, 0.5, 1.0}},
         {"modes", {"frozen", "fine-tuned"}}}}},
      {"partial", {{"rows", {"same-captions"}}, {"size", 0.0}, {"max_epoch", 15}, {"max_attempts", 5}}},
  };
  nn::write_json_file(dir / "experiment.json", experiment);
}

}  // namespace captrans::runner
