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

#include <span>
#include <vector>

#include "captrans/text/corpus.hpp"
#include "captrans/text/vocabulary.hpp"

namespace captrans::lm {

class LanguageModel;

/// kToken: exp of the mean negative log-probability over every predicted
/// position in the corpus (including each final boundary token).
/// kSentence: geometric mean of the per-sentence perplexities.
enum class PerplexityMode { kToken, kSentence };

/// Log-probabilities of one sentence's predicted positions and the targets
/// they were assigned to.
struct ScoredSentence {
  std::vector<double> log_probs;
  std::vector<int> targets;
};

/// Perplexity from precomputed scores. Every position whose target is the
/// unknown token has its probability divided by `unknown_divisor` (1 = no
/// correction). Returns +infinity if any probability is zero.
double perplexity_from_scores(std::span<const ScoredSentence> scores, PerplexityMode mode,
                              double unknown_divisor = 1.0);

std::vector<ScoredSentence> score_corpus(const LanguageModel& model, const text::Corpus& corpus);

double perplexity_geometric(const LanguageModel& model, const text::Corpus& corpus,
                            PerplexityMode mode = PerplexityMode::kToken);

/// Vocabulary-size-corrected perplexity. Each unknown-token probability p is
/// replaced by p / U with U = eval_vocab_types - (content types known to the
/// model). U = 0 gives perplexity_geometric exactly. Throws ConfigError when
/// eval_vocab_types is smaller than the known type count.
double fair_perplexity(const LanguageModel& model, const text::Corpus& corpus,
                       std::size_t eval_vocab_types, PerplexityMode mode = PerplexityMode::kToken);

/// Same correction with U given directly (the number of corpus word types the
/// vocabulary does not cover).
double fair_perplexity_with_unknown_types(const LanguageModel& model, const text::Corpus& corpus,
                                          std::size_t unknown_types,
                                          PerplexityMode mode = PerplexityMode::kToken);

/// Distinct tokens in the corpus.
std::size_t count_word_types(const text::Corpus& corpus);
/// Distinct corpus tokens absent from `vocab`.
std::size_t unknown_type_count(const text::Corpus& corpus, const text::Vocabulary& vocab);

}  // namespace captrans::lm
