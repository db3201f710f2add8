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

#include "captrans/text/dataset.hpp"

#include <cstring>
#include <fstream>
#include <set>

#include "json.hpp"

#include "captrans/errors.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::text {

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + s + "'");
}

std::vector<const CaptionItem*> CaptionDataset::items_in(Split split) const {
  std::vector<const CaptionItem*> out;
  for (const auto& item : items) {
    if (item.split == split) out.push_back(&item);
  }
  return out;
}

Corpus CaptionDataset::captions(Split split) const {
  Corpus c;
  c.source = CorpusSource::kSameCaptions;
  for (const auto& item : items) {
    if (item.split != split) continue;
    for (const auto& s : item.captions) c.sentences.push_back(s);
  }
  return c;
}

CaptionDataset read_caption_dataset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open caption dataset " + file.string());
  CaptionDataset ds;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = file.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("invalid JSON at " + where + ": " + e.what());
    }
    if (!j.contains("image_id") || !j.contains("split") || !j.contains("captions") ||
        !j["captions"].is_array()) {
      throw DataError("missing image_id/split/captions at " + where);
    }
    CaptionItem item;
    item.image_id = j["image_id"].get<std::string>();
    item.split = parse_split(j["split"].get<std::string>());
    for (const auto& c : j["captions"]) {
      auto s = preprocess_sentence(c.get<std::string>());
      if (s) item.captions.push_back(std::move(*s));
    }
    if (item.captions.empty()) throw DataError("image " + item.image_id + " has no usable captions");
    if (!seen.insert(item.image_id).second) {
      throw DataError("image id " + item.image_id + " appears more than once");
    }
    ds.items.push_back(std::move(item));
  }
  return ds;
}

void write_caption_dataset(const std::filesystem::path& file, const CaptionDataset& dataset) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  for (const auto& item : dataset.items) {
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& s : item.captions) caps.push_back(serialize_sentence(s));
    nlohmann::json j = {{"image_id", item.image_id}, {"split", to_string(item.split)}, {"captions", caps}};
    out << j.dump() << "\n";
  }
}

FeatureStore::FeatureStore(std::size_t dim, std::vector<float> data,
                           std::map<std::string, std::size_t> index)
    : dim_(dim), data_(std::move(data)), index_(std::move(index)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) throw DataError("feature data is not a whole number of rows");
  for (const auto& [id, r] : index_) {
    if (r >= rows()) throw DataError("feature index for " + id + " points past the last row");
  }
}

std::span<const float> FeatureStore::row(std::size_t r) const {
  if (r >= rows()) throw IndexError("feature row " + std::to_string(r) + " out of range");
  return std::span<const float>(data_).subspan(r * dim_, dim_);
}

std::size_t FeatureStore::row_of(const std::string& image_id) const {
  auto it = index_.find(image_id);
  if (it == index_.end()) throw DataError("no image features for " + image_id);
  return it->second;
}

std::filesystem::path FeatureStore::default_sidecar(const std::filesystem::path& file) {
  return file.string() + ".index.json";
}

FeatureStore FeatureStore::read(const std::filesystem::path& file, const std::filesystem::path& sidecar) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open features " + file.string());
  char magic[4];
  std::uint32_t header[2];
  if (!in.read(magic, 4) || std::memcmp(magic, "IMGF", 4) != 0) {
    throw DataError(file.string() + " is not an IMGF feature file");
  }
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw DataError("truncated header in " + file.string());
  }
  const std::size_t rows = header[0];
  const std::size_t dim = header[1];
  std::vector<float> data(rows * dim);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)))) {
    throw DataError("truncated feature rows in " + file.string());
  }
  const auto j = nn::read_json_file(sidecar.empty() ? default_sidecar(file) : sidecar);
  std::map<std::string, std::size_t> index;
  for (auto it = j.begin(); it != j.end(); ++it) index.emplace(it.key(), it.value().get<std::size_t>());
  return FeatureStore(dim, std::move(data), std::move(index));
}

void FeatureStore::write(const std::filesystem::path& file, const std::filesystem::path& sidecar) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(rows()), static_cast<std::uint32_t>(dim_)};
  out.write("IMGF", 4);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(float)));
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, r] : index_) j[id] = r;
  nn::write_json_file(sidecar.empty() ? default_sidecar(file) : sidecar, j);
}

void attach_features(CaptionDataset& dataset, const FeatureStore& features) {
  for (auto& item : dataset.items) item.feature_row = features.row_of(item.image_id);
}

}  // namespace captrans::text
