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
#include <string>
#include <vector>

#include "captrans/text/preprocess.hpp"

namespace captrans::text {

enum class CorpusSource { kSameCaptions, kDifferentCaptions, kGeneralText, kOther };

std::string to_string(CorpusSource s);
CorpusSource parse_corpus_source(const std::string& s);

struct Corpus {
  std::vector<Sentence> sentences;
  CorpusSource source = CorpusSource::kOther;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

/// Drops sentences with more than `max_tokens` tokens; order preserved.
Corpus filter_by_length(const Corpus& corpus, std::size_t max_tokens = 50);

/// round(10^exponent * base).
std::size_t subsample_size(double exponent, std::size_t base = 30000);

/// Uniform sample without replacement of subsample_size(exponent, base)
/// sentences, kept in original corpus order. Throws DataError if the corpus
/// is too small.
Corpus subsample_corpus(const Corpus& corpus, double exponent, std::uint64_t seed,
                        std::size_t base = 30000);

struct ReadStats {
  std::size_t lines = 0;
  std::size_t dropped_empty = 0;
};

/// Raw UTF-8 text, one sentence per line, preprocessed on read. Lines that
/// preprocess to nothing are dropped and counted.
Corpus read_raw_corpus(const std::filesystem::path& file, CorpusSource source,
                       ReadStats* stats = nullptr);
/// Already-preprocessed corpus (file spellings, space separated).
Corpus read_corpus(const std::filesystem::path& file, CorpusSource source = CorpusSource::kOther);
void write_corpus(const std::filesystem::path& file, const Corpus& corpus);

}  // namespace captrans::text
