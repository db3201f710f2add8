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

#include "captrans/lm/perplexity.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "captrans/errors.hpp"
#include "captrans/lm/language_model.hpp"

namespace captrans::lm {

double perplexity_from_scores(std::span<const ScoredSentence> scores, PerplexityMode mode,
                              double unknown_divisor) {
  if (!(unknown_divisor >= 1.0)) throw ConfigError("unknown-token divisor must be >= 1");
  const double log_div = std::log(unknown_divisor);
  double total = 0.0;
  std::size_t positions = 0;
  double sentence_total = 0.0;
  std::size_t sentences = 0;
  for (const auto& s : scores) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.log_probs.size(); ++i) {
      double lp = s.log_probs[i];
      if (lp == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
      if (s.targets[i] == text::Vocabulary::kUnknown) lp -= log_div;
      sum += lp;
    }
    total += sum;
    positions += s.log_probs.size();
    if (!s.log_probs.empty()) {
      sentence_total += -sum / static_cast<double>(s.log_probs.size());
      ++sentences;
    }
  }
  if (positions == 0) throw DataError("perplexity of an empty corpus is undefined");
  if (mode == PerplexityMode::kToken) return std::exp(-total / static_cast<double>(positions));
  return std::exp(sentence_total / static_cast<double>(sentences));
}

std::vector<ScoredSentence> score_corpus(const LanguageModel& model, const text::Corpus& corpus) {
  std::vector<ScoredSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus.sentences) {
    const auto enc = text::encode_sentence(s, model.vocab());
    ScoredSentence scored;
    scored.log_probs = model.token_log_probs(enc);
    scored.targets.assign(enc.begin() + 1, enc.end());
    out.push_back(std::move(scored));
  }
  return out;
}

double perplexity_geometric(const LanguageModel& model, const text::Corpus& corpus, PerplexityMode mode) {
  return perplexity_from_scores(score_corpus(model, corpus), mode);
}

double fair_perplexity_with_unknown_types(const LanguageModel& model, const text::Corpus& corpus,
                                          std::size_t unknown_types, PerplexityMode mode) {
  const double divisor = unknown_types == 0 ? 1.0 : static_cast<double>(unknown_types);
  return perplexity_from_scores(score_corpus(model, corpus), mode, divisor);
}

double fair_perplexity(const LanguageModel& model, const text::Corpus& corpus,
                       std::size_t eval_vocab_types, PerplexityMode mode) {
  const std::size_t known = model.vocab().content_size();
  if (eval_vocab_types < known) {
    throw ConfigError("evaluation corpus has " + std::to_string(eval_vocab_types) +
                      " word types but the model knows " + std::to_string(known));
  }
  return fair_perplexity_with_unknown_types(model, corpus, eval_vocab_types - known, mode);
}

std::size_t count_word_types(const text::Corpus& corpus) {
  std::set<std::string> types;
  for (const auto& s : corpus.sentences) types.insert(s.begin(), s.end());
  return types.size();
}

std::size_t unknown_type_count(const text::Corpus& corpus, const text::Vocabulary& vocab) {
  std::set<std::string> types;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s) {
      if (!vocab.contains(t)) types.insert(t);
    }
  }
  return types.size();
}

}  // namespace captrans::lm
