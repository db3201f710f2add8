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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "captrans/capgen/caption_generator.hpp"
#include "captrans/lm/language_model.hpp"
#include "captrans/metrics/wmd.hpp"
#include "captrans/runner/hyperparams.hpp"
#include "captrans/text/dataset.hpp"

namespace captrans::runner {

enum class RowType { kNoTransfer, kSameCaptions, kDifferentCaptions, kGeneralText };

std::string to_string(RowType t);
RowType parse_row_type(const std::string& s);

struct LmCorpusSpec {
  bool from_dataset = false;  // train/val captions of the caption dataset
  std::filesystem::path train;
  std::filesystem::path val;
  /// Raw text is preprocessed on load; otherwise files hold cleaned tokens.
  bool raw = true;
  std::size_t max_length = 50;
};

struct RowSpec {
  RowType type = RowType::kNoTransfer;
  std::filesystem::path hyperparams;
  std::optional<LmCorpusSpec> lm_corpus;
  std::vector<double> sizes;
  std::vector<capgen::TransferMode> modes;
};

struct PartialSpec {
  std::vector<RowType> rows;
  double size = 0.0;
  int max_epoch = 15;
  int max_attempts = 5;
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::filesystem::path features;
  std::filesystem::path embeddings;  // empty: the LM's own embedding table
  std::size_t size_base = 30000;
  std::size_t min_count = 5;
  int repeats = 5;
  std::uint64_t seed = 0;
  std::vector<RowSpec> rows;
  PartialSpec partial;

  /// Relative paths are resolved against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& file);
  void validate() const;
  const RowSpec& row(RowType t) const;
};

/// One (row, size, mode) cell and repeat.
struct TrialSpec {
  RowType type = RowType::kNoTransfer;
  double size = 0.0;  // exponent; unused without transfer
  capgen::TransferMode mode = capgen::TransferMode::kFineTuned;
  int repeat = 0;

  std::string cell_id() const;
  std::string key() const;  // cell_id plus repeat
};

struct ResultRow {
  std::string type;
  std::string mode;
  bool frozen = false;
  double size_exponent = 0.0;
  std::size_t corpus_size = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  double lm_val_perplexity = 0.0;
  double lm_fair_perplexity = 0.0;
  int lm_epochs = 0;
  int capgen_epochs = 0;
  double test_perplexity = 0.0;
  double test_fair_perplexity = 0.0;
  double cider = 0.0;
  double wmd = 0.0;
  std::string error;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  static ResultRow from_json(const nlohmann::json& j);
};

/// Column names; wall_seconds is always last.
const std::vector<std::string>& result_columns();
std::vector<std::string> result_fields(const ResultRow& r);

/// Shared, lazily loaded inputs of one experiment.
class ExperimentContext {
 public:
  explicit ExperimentContext(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const text::CaptionDataset& dataset();
  const text::FeatureStore& features();
  const text::Vocabulary& caption_vocab();
  /// Training and validation corpora of a transfer row.
  const text::Corpus& lm_train(RowType t);
  const text::Corpus& lm_val(RowType t);
  const Hyperparams& hyperparams(RowType t);
  /// Fixed table if configured, otherwise nullptr.
  const metrics::WordEmbeddingTable* embeddings();

 private:
  void load_corpora(RowType t);

  ExperimentConfig config_;
  std::optional<text::CaptionDataset> dataset_;
  std::optional<text::FeatureStore> features_;
  std::optional<text::Vocabulary> caption_vocab_;
  std::map<RowType, std::pair<text::Corpus, text::Corpus>> corpora_;
  std::map<RowType, Hyperparams> hyperparams_;
  std::optional<metrics::WordEmbeddingTable> embeddings_;
  bool embeddings_loaded_ = false;
};

struct LmOutcome {
  std::size_t corpus_size = 0;
  double val_perplexity = 0.0;
  double fair_perplexity = 0.0;
  int epochs = 0;
};

/// Subsamples the row's corpus, builds its vocabulary and trains the LM with
/// early stopping. Seeds derive from (config seed, row, size, repeat).
lm::LanguageModel train_source_lm(ExperimentContext& ctx, RowType type, double size, int repeat,
                                  LmOutcome* outcome);

/// Geometric and fair perplexity of an LM on its row's validation corpus.
LmOutcome evaluate_source_lm(ExperimentContext& ctx, RowType type, const lm::LanguageModel& model);

/// Fresh caption generator for a trial: intersected vocabulary and LM sizes
/// with a source LM, caption vocabulary and the capgen sizes without.
capgen::CaptionGenerator make_caption_generator(ExperimentContext& ctx, const CapgenSettings& settings,
                                                const lm::LanguageModel* source, capgen::TransferMode mode);

struct CaptionOutcome {
  int epochs = 0;
  double test_perplexity = 0.0;
  double test_fair_perplexity = 0.0;
  double cider = 0.0;
  double wmd = 0.0;
};

/// Trains the caption generator, decodes the test split and scores it.
CaptionOutcome train_and_score(ExperimentContext& ctx, capgen::CaptionGenerator& model,
                               const CapgenSettings& settings, const lm::LanguageModel* source,
                               const std::filesystem::path& save_dir = {});

/// Test-caption perplexity of an add-one unigram model fitted to the
/// training captions. The final EDGE of each caption counts as a token.
double unigram_test_perplexity(const text::CaptionDataset& dataset, const text::Vocabulary& vocab);

/// Seed for the caption-generator side of a trial.
std::uint64_t trial_seed(std::uint64_t base, const TrialSpec& spec);
/// Seed for the source LM; shared by the frozen and fine-tuned cells.
std::uint64_t lm_seed(std::uint64_t base, RowType type, double size, int repeat);

std::string format_size(double exponent);

}  // namespace captrans::runner
