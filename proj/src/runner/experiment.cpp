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

#include "captrans/runner/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "captrans/capgen/decode.hpp"
#include "captrans/capgen/train.hpp"
#include "captrans/capgen/transfer.hpp"
#include "captrans/errors.hpp"
#include "captrans/lm/perplexity.hpp"
#include "captrans/metrics/cider.hpp"
#include "captrans/metrics/report.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::runner {

std::string to_string(RowType t) {
  switch (t) {
    case RowType::kNoTransfer: return "no-transfer";
    case RowType::kSameCaptions: return "same-captions";
    case RowType::kDifferentCaptions: return "different-captions";
    case RowType::kGeneralText: return "general-text";
  }
  return "no-transfer";
}

RowType parse_row_type(const std::string& s) {
  if (s == "no-transfer") return RowType::kNoTransfer;
  if (s == "same-captions") return RowType::kSameCaptions;
  if (s == "different-captions") return RowType::kDifferentCaptions;
  if (s == "general-text") return RowType::kGeneralText;
  throw ConfigError("unknown row type '" + s +
                    "' (expected no-transfer, same-captions, different-captions or general-text)");
}

std::string format_size(double exponent) {
  std::ostringstream ss;
  ss << exponent;
  return ss.str();
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

bool is_allowed_size(double x) {
  for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    if (x == v) return true;
  }
  return false;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    c.dataset = resolve(base_dir, j.at("dataset").get<std::string>());
    c.features = resolve(base_dir, j.at("features").get<std::string>());
    c.embeddings = resolve(base_dir, j.value("embeddings", ""));
    c.size_base = j.value("size_base", c.size_base);
    c.min_count = j.value("min_count", c.min_count);
    c.repeats = j.value("repeats", c.repeats);
    c.seed = j.value("seed", c.seed);
    for (const auto& r : j.at("rows")) {
      RowSpec row;
      row.type = parse_row_type(r.at("type").get<std::string>());
      row.hyperparams = resolve(base_dir, r.at("hyperparams").get<std::string>());
      if (r.contains("lm_corpus")) {
        const auto& lc = r.at("lm_corpus");
        LmCorpusSpec spec;
        spec.from_dataset = lc.value("from_dataset", false);
        spec.train = resolve(base_dir, lc.value("train", ""));
        spec.val = resolve(base_dir, lc.value("val", ""));
        spec.raw = lc.value("raw", true);
        spec.max_length = lc.value("max_length", spec.max_length);
        row.lm_corpus = spec;
      }
      row.sizes = r.value("sizes", std::vector<double>{});
      for (const auto& m : r.value("modes", std::vector<std::string>{"fine-tuned"})) {
        row.modes.push_back(capgen::parse_transfer_mode(m));
      }
      c.rows.push_back(std::move(row));
    }
    if (j.contains("partial")) {
      const auto& p = j.at("partial");
      for (const auto& t : p.value("rows", std::vector<std::string>{})) c.partial.rows.push_back(parse_row_type(t));
      c.partial.size = p.value("size", c.partial.size);
      c.partial.max_epoch = p.value("max_epoch", c.partial.max_epoch);
      c.partial.max_attempts = p.value("max_attempts", c.partial.max_attempts);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw ConfigError("experiment config " + file.string() + " not found");
  nlohmann::json j;
  try {
    j = nn::read_json_file(file);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

void ExperimentConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (size_base == 0) throw ConfigError("size_base must be positive");
  std::set<RowType> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.type).second) throw ConfigError("row " + to_string(r.type) + " appears twice");
    if (r.modes.empty()) throw ConfigError("row " + to_string(r.type) + " lists no transfer modes");
    if (r.type == RowType::kNoTransfer) {
      if (r.lm_corpus) throw ConfigError("the no-transfer row takes no language model corpus");
      if (r.modes.size() != 1 || r.modes[0] != capgen::TransferMode::kFineTuned) {
        throw ConfigError("the no-transfer row is fine-tuned only");
      }
      continue;
    }
    if (!r.lm_corpus) throw ConfigError("row " + to_string(r.type) + " needs an lm_corpus");
    if (!r.lm_corpus->from_dataset && (r.lm_corpus->train.empty() || r.lm_corpus->val.empty())) {
      throw ConfigError("row " + to_string(r.type) + " needs lm_corpus train and val files");
    }
    if (r.sizes.empty()) throw ConfigError("row " + to_string(r.type) + " lists no corpus sizes");
    for (double x : r.sizes) {
      if (!is_allowed_size(x)) throw ConfigError("size exponents must be one of -1, -0.5, 0, 0.5, 1");
      if (r.type == RowType::kSameCaptions && x > 0.0) {
        throw ConfigError("same-captions sizes are limited to -1, -0.5 and 0");
      }
    }
    for (auto m : r.modes) {
      if (m == capgen::TransferMode::kNone) throw ConfigError("transfer rows take frozen or fine-tuned modes");
    }
  }
  for (RowType t : partial.rows) {
    if (t == RowType::kNoTransfer) throw ConfigError("partial training needs a transfer row");
    if (!seen.count(t)) throw ConfigError("partial row " + to_string(t) + " is not defined in rows");
  }
  if (partial.max_epoch < 0 || partial.max_attempts < 1) throw ConfigError("invalid partial-training limits");
}

const RowSpec& ExperimentConfig::row(RowType t) const {
  for (const auto& r : rows) {
    if (r.type == t) return r;
  }
  throw ConfigError("row " + to_string(t) + " is not defined");
}

std::string TrialSpec::cell_id() const {
  if (type == RowType::kNoTransfer) return to_string(type) + "/" + capgen::to_string(mode);
  return to_string(type) + "/" + format_size(size) + "/" + capgen::to_string(mode);
}

std::string TrialSpec::key() const { return cell_id() + "/r" + std::to_string(repeat); }

nlohmann::json ResultRow::to_json() const {
  return {{"type", type},
          {"mode", mode},
          {"frozen", frozen},
          {"size_exponent", size_exponent},
          {"corpus_size", corpus_size},
          {"repeat", repeat},
          {"seed", seed},
          {"status", status},
          {"lm_val_perplexity", lm_val_perplexity},
          {"lm_fair_perplexity", lm_fair_perplexity},
          {"lm_epochs", lm_epochs},
          {"capgen_epochs", capgen_epochs},
          {"test_perplexity", test_perplexity},
          {"test_fair_perplexity", test_fair_perplexity},
          {"cider", cider},
          {"wmd", wmd},
          {"error", error},
          {"wall_seconds", wall_seconds}};
}

namespace {
// JSON has no NaN/inf; they are stored as null.
double num(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::nan("") : v.get<double>();
}
}  // namespace

ResultRow ResultRow::from_json(const nlohmann::json& j) {
  ResultRow r;
  r.type = j.at("type").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.frozen = j.at("frozen").get<bool>();
  r.size_exponent = j.at("size_exponent").get<double>();
  r.corpus_size = j.at("corpus_size").get<std::size_t>();
  r.repeat = j.at("repeat").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = j.at("status").get<std::string>();
  r.lm_val_perplexity = num(j, "lm_val_perplexity");
  r.lm_fair_perplexity = num(j, "lm_fair_perplexity");
  r.lm_epochs = j.at("lm_epochs").get<int>();
  r.capgen_epochs = j.at("capgen_epochs").get<int>();
  r.test_perplexity = num(j, "test_perplexity");
  r.test_fair_perplexity = num(j, "test_fair_perplexity");
  r.cider = num(j, "cider");
  r.wmd = num(j, "wmd");
  r.error = j.value("error", "");
  r.wall_seconds = num(j, "wall_seconds");
  return r;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols = {
      "type",           "mode",          "frozen",          "size_exponent",        "corpus_size",
      "repeat",         "seed",          "status",          "lm_val_perplexity",    "lm_fair_perplexity",
      "lm_epochs",      "capgen_epochs", "test_perplexity", "test_fair_perplexity", "cider",
      "wmd",            "error",         "wall_seconds"};
  return cols;
}

std::vector<std::string> result_fields(const ResultRow& r) {
  using metrics::format_double;
  std::string err = r.error;
  for (char& ch : err) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", r.wall_seconds);
  return {r.type,
          r.mode,
          r.frozen ? "true" : "false",
          format_size(r.size_exponent),
          std::to_string(r.corpus_size),
          std::to_string(r.repeat),
          std::to_string(r.seed),
          r.status,
          format_double(r.lm_val_perplexity),
          format_double(r.lm_fair_perplexity),
          std::to_string(r.lm_epochs),
          std::to_string(r.capgen_epochs),
          format_double(r.test_perplexity),
          format_double(r.test_fair_perplexity),
          format_double(r.cider),
          format_double(r.wmd),
          err,
          wall};
}

ExperimentContext::ExperimentContext(ExperimentConfig config) : config_(std::move(config)) {}

const text::CaptionDataset& ExperimentContext::dataset() {
  if (!dataset_) {
    if (!std::filesystem::exists(config_.dataset)) throw DataError("dataset " + config_.dataset.string() + " not found");
    dataset_ = text::read_caption_dataset(config_.dataset);
  }
  return *dataset_;
}

const text::FeatureStore& ExperimentContext::features() {
  if (!features_) {
    if (!std::filesystem::exists(config_.features)) {
      throw DataError("features " + config_.features.string() + " not found");
    }
    features_ = text::FeatureStore::read(config_.features);
    text::CaptionDataset copy = dataset();
    text::attach_features(copy, *features_);  // fail early on a missing id
  }
  return *features_;
}

const text::Vocabulary& ExperimentContext::caption_vocab() {
  if (!caption_vocab_) caption_vocab_ = text::build_vocabulary(dataset().captions(text::Split::kTrain), config_.min_count);
  return *caption_vocab_;
}

void ExperimentContext::load_corpora(RowType t) {
  if (corpora_.count(t)) return;
  const RowSpec& row = config_.row(t);
  if (!row.lm_corpus) throw ConfigError("row " + to_string(t) + " has no language model corpus");
  const LmCorpusSpec& spec = *row.lm_corpus;
  text::Corpus train;
  text::Corpus val;
  if (spec.from_dataset) {
    train = dataset().captions(text::Split::kTrain);
    val = dataset().captions(text::Split::kVal);
  } else {
    for (const auto* p : {&spec.train, &spec.val}) {
      if (!std::filesystem::exists(*p)) throw DataError("corpus " + p->string() + " not found");
    }
    const auto source = t == RowType::kGeneralText ? text::CorpusSource::kGeneralText
                                                   : text::CorpusSource::kDifferentCaptions;
    train = spec.raw ? text::read_raw_corpus(spec.train, source) : text::read_corpus(spec.train, source);
    val = spec.raw ? text::read_raw_corpus(spec.val, source) : text::read_corpus(spec.val, source);
    train = text::filter_by_length(train, spec.max_length);
    val = text::filter_by_length(val, spec.max_length);
  }
  corpora_.emplace(t, std::make_pair(std::move(train), std::move(val)));
}

const text::Corpus& ExperimentContext::lm_train(RowType t) {
  load_corpora(t);
  return corpora_.at(t).first;
}

const text::Corpus& ExperimentContext::lm_val(RowType t) {
  load_corpora(t);
  return corpora_.at(t).second;
}

const Hyperparams& ExperimentContext::hyperparams(RowType t) {
  auto it = hyperparams_.find(t);
  if (it == hyperparams_.end()) it = hyperparams_.emplace(t, Hyperparams::load(config_.row(t).hyperparams)).first;
  return it->second;
}

const metrics::WordEmbeddingTable* ExperimentContext::embeddings() {
  if (!embeddings_loaded_) {
    embeddings_loaded_ = true;
    if (!config_.embeddings.empty()) {
      if (!std::filesystem::exists(config_.embeddings)) {
        throw DataError("embeddings " + config_.embeddings.string() + " not found");
      }
      embeddings_ = metrics::WordEmbeddingTable::read(config_.embeddings);
    }
  }
  return embeddings_ ? &*embeddings_ : nullptr;
}

std::uint64_t trial_seed(std::uint64_t base, const TrialSpec& spec) {
  return nn::derive_seed(base, "trial:" + spec.cell_id(), {spec.repeat});
}

std::uint64_t lm_seed(std::uint64_t base, RowType type, double size, int repeat) {
  return nn::derive_seed(base, "lm:" + to_string(type) + "/" + format_size(size), {repeat});
}

LmOutcome evaluate_source_lm(ExperimentContext& ctx, RowType type, const lm::LanguageModel& model) {
  const text::Corpus& val = ctx.lm_val(type);
  LmOutcome out;
  if (val.empty()) return out;
  out.val_perplexity = lm::perplexity_geometric(model, val);
  out.fair_perplexity = lm::fair_perplexity_with_unknown_types(model, val, lm::unknown_type_count(val, model.vocab()));
  return out;
}

lm::LanguageModel train_source_lm(ExperimentContext& ctx, RowType type, double size, int repeat,
                                  LmOutcome* outcome) {
  const Hyperparams& hp = ctx.hyperparams(type);
  if (!hp.lm) throw ConfigError("hyperparameters of row " + to_string(type) + " have no lm section");
  const std::uint64_t seed = lm_seed(ctx.config().seed, type, size, repeat);
  const text::Corpus sub = text::subsample_corpus(ctx.lm_train(type), size, nn::derive_seed(seed, "subsample"),
                                                  ctx.config().size_base);
  const LmSettings settings = lm_settings(*hp.lm, seed);
  auto model = lm::LanguageModel::create(text::build_vocabulary(sub, ctx.config().min_count), settings.embed_size,
                                         settings.rnn_size, settings.init);
  const lm::TrainHistory history = lm::train_lm(model, sub, ctx.lm_val(type), settings.train);
  if (outcome) {
    *outcome = evaluate_source_lm(ctx, type, model);
    outcome->corpus_size = sub.size();
    outcome->epochs = history.selected_epoch;
  }
  return model;
}

capgen::CaptionGenerator make_caption_generator(ExperimentContext& ctx, const CapgenSettings& settings,
                                                const lm::LanguageModel* source, capgen::TransferMode mode) {
  capgen::CaptionModelConfig mc;
  mc.embed_size = source ? source->embed_size() : settings.embed_size;
  mc.rnn_size = source ? source->rnn_size() : settings.rnn_size;
  mc.feature_size = ctx.features().dim();
  mc.post_image_size = settings.post_image_size;
  mc.post_image_activation = settings.post_image_activation;
  mc.normalize_image = settings.normalize_image;
  mc.init = settings.init;
  text::Vocabulary vocab = source ? text::intersect_vocabulary(source->vocab(), ctx.caption_vocab()) : ctx.caption_vocab();
  auto model = capgen::CaptionGenerator::create(std::move(vocab), mc);
  if (source && mode != capgen::TransferMode::kNone) capgen::transfer_prefix_params(*source, model, mode);
  return model;
}

CaptionOutcome train_and_score(ExperimentContext& ctx, capgen::CaptionGenerator& model,
                               const CapgenSettings& settings, const lm::LanguageModel* source,
                               const std::filesystem::path& save_dir) {
  const auto& dataset = ctx.dataset();
  const auto& features = ctx.features();
  CaptionOutcome out;
  const lm::TrainHistory history = capgen::train_capgen(model, dataset, features, settings.train);
  out.epochs = history.selected_epoch;

  const auto test = dataset.items_in(text::Split::kTest);
  if (test.empty()) throw DataError("caption dataset has no test items");
  const auto scores = capgen::score_captions(model, test, features);
  out.test_perplexity = lm::perplexity_from_scores(scores, lm::PerplexityMode::kToken);
  const std::size_t unknown = lm::unknown_type_count(dataset.captions(text::Split::kTest), model.vocab());
  out.test_fair_perplexity = lm::perplexity_from_scores(scores, lm::PerplexityMode::kToken,
                                                        static_cast<double>(std::max<std::size_t>(unknown, 1)));

  const auto generated = capgen::generate_captions(model, test, features, settings.generation);
  const auto candidates = capgen::as_candidates(generated);
  const auto refs = metrics::references(dataset, text::Split::kTest);
  out.cider = metrics::cider_score(candidates, refs).score;
  if (const auto* fixed = ctx.embeddings()) {
    out.wmd = metrics::wmd_similarity_report(candidates, refs, *fixed).value;
  } else if (source) {
    const auto table = metrics::WordEmbeddingTable::from_model(source->vocab(), source->params().value(lm::kEmbeddingParam));
    out.wmd = metrics::wmd_similarity_report(candidates, refs, table).value;
  } else {
    const auto table = metrics::WordEmbeddingTable::from_model(model.vocab(), model.params().value(lm::kEmbeddingParam));
    out.wmd = metrics::wmd_similarity_report(candidates, refs, table).value;
  }

  if (!save_dir.empty()) {
    model.save(save_dir);
    history.write_csv(save_dir / "history.csv");
    capgen::write_generations(save_dir / "generations.jsonl", generated);
  }
  return out;
}

double unigram_test_perplexity(const text::CaptionDataset& dataset, const text::Vocabulary& vocab) {
  std::vector<double> counts(vocab.size(), 1.0);
  double total = static_cast<double>(vocab.size());
  for (const auto& s : dataset.captions(text::Split::kTrain).sentences) {
    const auto enc = text::encode_sentence(s, vocab);
    for (std::size_t i = 1; i < enc.size(); ++i) {
      counts[static_cast<std::size_t>(enc[i])] += 1.0;
      total += 1.0;
    }
  }
  std::vector<lm::ScoredSentence> scores;
  for (const auto& s : dataset.captions(text::Split::kTest).sentences) {
    const auto enc = text::encode_sentence(s, vocab);
    lm::ScoredSentence sc;
    for (std::size_t i = 1; i < enc.size(); ++i) {
      sc.log_probs.push_back(std::log(counts[static_cast<std::size_t>(enc[i])] / total));
      sc.targets.push_back(enc[i]);
    }
    scores.push_back(std::move(sc));
  }
  return lm::perplexity_from_scores(scores, lm::PerplexityMode::kToken);
}

}  // namespace captrans::runner
