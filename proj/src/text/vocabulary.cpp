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

#include "captrans/text/vocabulary.hpp"

#include <algorithm>

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"
#include "captrans/text/corpus.hpp"

namespace captrans::text {

Vocabulary::Vocabulary() {
  tokens_ = {kEdgeToken, kUnknownToken};
  index_ = {{kEdgeToken, kEdge}, {kUnknownToken, kUnknown}};
}

Vocabulary Vocabulary::from_content(const std::vector<std::string>& content, std::size_t min_count) {
  Vocabulary v;
  v.min_count_ = min_count;
  for (const auto& t : content) {
    if (v.index_.count(t)) throw ConfigError("duplicate or reserved vocabulary token: " + t);
    v.index_.emplace(t, static_cast<int>(v.tokens_.size()));
    v.tokens_.push_back(t);
  }
  return v;
}

int Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

const std::string& Vocabulary::token(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= tokens_.size()) {
    throw IndexError("vocabulary index " + std::to_string(index) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(index)];
}

std::vector<std::string> Vocabulary::content_tokens() const {
  return {tokens_.begin() + kReservedCount, tokens_.end()};
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tokens_) arr.push_back(serialize_token(t));
  return arr;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() < kReservedCount) throw DataError("vocabulary JSON must be an array");
  if (j[0] != kEdgeToken || j[1] != kUnknownToken) {
    throw DataError("vocabulary JSON must start with the reserved tokens");
  }
  std::vector<std::string> content;
  for (std::size_t i = kReservedCount; i < j.size(); ++i) {
    content.push_back(deserialize_token(j[i].get<std::string>()));
  }
  try {
    return from_content(content);
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& file) const { nn::write_json_file(file, to_json()); }

Vocabulary Vocabulary::load(const std::filesystem::path& file) {
  return from_json(nn::read_json_file(file));
}

std::map<std::string, std::size_t> count_tokens(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus.sentences) {
    for (const auto& t : s) ++counts[t];
  }
  return counts;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count) {
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, n] : count_tokens(corpus)) {
    if (n >= min_count && token != Vocabulary::kEdgeToken && token != Vocabulary::kUnknownToken) {
      kept.emplace_back(token, n);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> content;
  content.reserve(kept.size());
  for (auto& [token, n] : kept) content.push_back(token);
  return Vocabulary::from_content(content, min_count);
}

Vocabulary intersect_vocabulary(const Vocabulary& lm_vocab, const Vocabulary& caption_vocab) {
  std::vector<std::string> content;
  for (const auto& t : caption_vocab.content_tokens()) {
    if (lm_vocab.contains(t)) content.push_back(t);
  }
  if (content.empty()) {
    throw ConfigError("language model and caption vocabularies share no tokens");
  }
  return Vocabulary::from_content(content, caption_vocab.min_count());
}

std::vector<int> encode_sentence(const Sentence& s, const Vocabulary& v) {
  std::vector<int> out;
  out.reserve(s.size() + 2);
  out.push_back(Vocabulary::kEdge);
  for (const auto& t : s) out.push_back(v.index_of(t));
  out.push_back(Vocabulary::kEdge);
  return out;
}

Sentence decode_sentence(std::span<const int> indices, const Vocabulary& v) {
  Sentence out;
  for (int i : indices) {
    if (i == Vocabulary::kEdge) continue;
    out.push_back(v.token(i));
  }
  return out;
}

}  // namespace captrans::text
