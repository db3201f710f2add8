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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "captrans/text/corpus.hpp"

namespace captrans::text {

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split s);
Split parse_split(const std::string& s);

struct CaptionItem {
  std::string image_id;
  Split split = Split::kTrain;
  std::vector<Sentence> captions;
  /// Row in the feature store; set by attach_features.
  std::optional<std::size_t> feature_row;
};

struct CaptionDataset {
  std::vector<CaptionItem> items;

  std::vector<const CaptionItem*> items_in(Split split) const;
  /// All captions of one split as a corpus, in item order.
  Corpus captions(Split split) const;
};

/// JSONL, one object per image:
///   {"image_id": str, "split": "train"|"val"|"test", "captions": [str, ...]}
/// Captions are preprocessed on read; captions that clean to nothing are
/// dropped. An item left without captions, or a repeated image id, is a
/// DataError.
CaptionDataset read_caption_dataset(const std::filesystem::path& file);
/// Writes captions in their preprocessed form (file spellings).
void write_caption_dataset(const std::filesystem::path& file, const CaptionDataset& dataset);

/// Dense image features: "IMGF", u32 row count, u32 dimension, then float32
/// rows. A sidecar JSON object maps image id -> row.
class FeatureStore {
 public:
  FeatureStore() = default;
  FeatureStore(std::size_t dim, std::vector<float> data, std::map<std::string, std::size_t> index);

  std::size_t rows() const { return dim_ ? data_.size() / dim_ : 0; }
  std::size_t dim() const { return dim_; }
  std::span<const float> row(std::size_t r) const;
  /// DataError if the id has no row.
  std::size_t row_of(const std::string& image_id) const;
  std::span<const float> features(const std::string& image_id) const { return row(row_of(image_id)); }
  const std::map<std::string, std::size_t>& index() const { return index_; }

  static FeatureStore read(const std::filesystem::path& file,
                           const std::filesystem::path& sidecar = {});
  void write(const std::filesystem::path& file, const std::filesystem::path& sidecar = {}) const;
  /// Default sidecar location: `<file>.index.json`.
  static std::filesystem::path default_sidecar(const std::filesystem::path& file);

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::map<std::string, std::size_t> index_;
};

/// Resolves every item's feature row; DataError on the first missing id.
void attach_features(CaptionDataset& dataset, const FeatureStore& features);

}  // namespace captrans::text
