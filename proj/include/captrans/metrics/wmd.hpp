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
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/metrics/cider.hpp"
#include "captrans/nn/param_store.hpp"
#include "captrans/text/vocabulary.hpp"

namespace captrans::metrics {

/// Raised when a sentence has no token with an embedding.
class UndefinedDistanceError : public DataError {
 public:
  using DataError::DataError;
};

/// Token -> fixed-size vector. File form: "EMBT", u32 count, u32 dim, float32
/// rows, plus a JSON sidecar (`<file>.index.json`) mapping token -> row.
class WordEmbeddingTable {
 public:
  WordEmbeddingTable() = default;
  WordEmbeddingTable(std::size_t dim, std::vector<float> data, std::map<std::string, std::size_t> index);

  /// Content-token rows of a model's embedding table.
  static WordEmbeddingTable from_model(const text::Vocabulary& vocab, const nn::Tensor& embedding);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  /// Empty span when the token is absent.
  std::span<const float> vector(const std::string& token) const;

  static WordEmbeddingTable read(const std::filesystem::path& file, const std::filesystem::path& sidecar = {});
  void write(const std::filesystem::path& file, const std::filesystem::path& sidecar = {}) const;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::map<std::string, std::size_t> index_;
};

/// Word mover's distance: exact minimum-cost transport between the normalised
/// bag-of-words distributions of a and b with Euclidean ground cost. Tokens
/// without an embedding are dropped first.
double wmd_distance(const text::Sentence& a, const text::Sentence& b, const WordEmbeddingTable& emb);

struct SimilarityReport {
  double value = 0.0;  // mean over scored images; NaN when none could be scored
  std::size_t n_images = 0;
  std::size_t n_skipped = 0;
  std::map<std::string, double> per_image;
};

/// Per image exp(-min over references of wmd_distance), averaged over images.
/// References with undefined distance are ignored; an image with no defined
/// distance is skipped and counted.
SimilarityReport wmd_similarity_report(const CandidateSet& candidates, const ReferenceSet& refs,
                                       const WordEmbeddingTable& emb);

}  // namespace captrans::metrics
