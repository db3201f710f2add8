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

#include "captrans/text/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "captrans/errors.hpp"
#include "captrans/nn/rng.hpp"

namespace captrans::text {

std::string to_string(CorpusSource s) {
  switch (s) {
    case CorpusSource::kSameCaptions: return "same-captions";
    case CorpusSource::kDifferentCaptions: return "different-captions";
    case CorpusSource::kGeneralText: return "general-text";
    case CorpusSource::kOther: return "other";
  }
  return "other";
}

CorpusSource parse_corpus_source(const std::string& s) {
  if (s == "same-captions") return CorpusSource::kSameCaptions;
  if (s == "different-captions") return CorpusSource::kDifferentCaptions;
  if (s == "general-text") return CorpusSource::kGeneralText;
  if (s == "other") return CorpusSource::kOther;
  throw ConfigError("unknown corpus source '" + s + "'");
}

Corpus filter_by_length(const Corpus& corpus, std::size_t max_tokens) {
  Corpus out;
  out.source = corpus.source;
  for (const auto& s : corpus.sentences) {
    if (s.size() <= max_tokens) out.sentences.push_back(s);
  }
  return out;
}

std::size_t subsample_size(double exponent, std::size_t base) {
  return static_cast<std::size_t>(std::llround(std::pow(10.0, exponent) * static_cast<double>(base)));
}

Corpus subsample_corpus(const Corpus& corpus, double exponent, std::uint64_t seed, std::size_t base) {
  const std::size_t n = subsample_size(exponent, base);
  if (n > corpus.size()) {
    throw DataError("requested " + std::to_string(n) + " sentences but the corpus has only " +
                    std::to_string(corpus.size()));
  }
  // Partial Fisher-Yates over indices, then restore corpus order.
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  nn::Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.source = corpus.source;
  out.sentences.reserve(n);
  for (std::size_t i : idx) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

Corpus read_raw_corpus(const std::filesystem::path& file, CorpusSource source, ReadStats* stats) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open corpus " + file.string());
  Corpus out;
  out.source = source;
  ReadStats local;
  std::string line;
  while (std::getline(in, line)) {
    ++local.lines;
    auto s = preprocess_sentence(line);
    if (s) {
      out.sentences.push_back(std::move(*s));
    } else {
      ++local.dropped_empty;
    }
  }
  if (stats) *stats = local;
  return out;
}

Corpus read_corpus(const std::filesystem::path& file, CorpusSource source) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open corpus " + file.string());
  Corpus out;
  out.source = source;
  std::string line;
  while (std::getline(in, line)) {
    Sentence s = deserialize_sentence(line);
    if (!s.empty()) out.sentences.push_back(std::move(s));
  }
  return out;
}

void write_corpus(const std::filesystem::path& file, const Corpus& corpus) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot write corpus " + file.string());
  for (const auto& s : corpus.sentences) out << serialize_sentence(s) << "\n";
}

}  // namespace captrans::text
