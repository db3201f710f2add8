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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "captrans/text/preprocess.hpp"

namespace captrans::text {

struct Corpus;

/// Token <-> index mapping. Index 0 is the sentence boundary token (used for
/// both start and end), index 1 the unknown token; content tokens follow.
class Vocabulary {
 public:
  static constexpr int kEdge = 0;
  static constexpr int kUnknown = 1;
  static constexpr std::size_t kReservedCount = 2;
  static inline const std::string kEdgeToken = "<edge>";
  static inline const std::string kUnknownToken = "<unk>";

  Vocabulary();
  /// Reserved tokens followed by `content` in the given order. Duplicates or
  /// reserved spellings in `content` are a ConfigError.
  static Vocabulary from_content(const std::vector<std::string>& content, std::size_t min_count = 0);

  /// Index of `token`, or kUnknown.
  int index_of(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token(int index) const;

  std::size_t size() const { return tokens_.size(); }
  std::size_t content_size() const { return tokens_.size() - kReservedCount; }
  std::span<const std::string> tokens() const { return tokens_; }
  std::vector<std::string> content_tokens() const;
  std::size_t min_count() const { return min_count_; }

  /// JSON array in index order (file spellings).
  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& file) const;
  static Vocabulary load(const std::filesystem::path& file);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  std::size_t min_count_ = 0;
};

/// Token frequencies over all sentences.
std::map<std::string, std::size_t> count_tokens(const Corpus& corpus);

/// Keeps tokens occurring at least `min_count` times, ordered by descending
/// count then lexicographically.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count = 5);

/// Content tokens present in both, in the caption vocabulary's order. Throws
/// ConfigError when the intersection is empty.
Vocabulary intersect_vocabulary(const Vocabulary& lm_vocab, const Vocabulary& caption_vocab);

/// [EDGE, w1 .. wn, EDGE] with OOV tokens mapped to kUnknown.
std::vector<int> encode_sentence(const Sentence& s, const Vocabulary& v);
/// Inverse of encode_sentence for known tokens; boundary tokens are dropped.
Sentence decode_sentence(std::span<const int> indices, const Vocabulary& v);

}  // namespace captrans::text
