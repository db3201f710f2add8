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

#include "captrans/metrics/wmd.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>

#include "captrans/metrics/transport.hpp"
#include "captrans/nn/checkpoint.hpp"

namespace captrans::metrics {

WordEmbeddingTable::WordEmbeddingTable(std::size_t dim, std::vector<float> data,
                                       std::map<std::string, std::size_t> index)
    : dim_(dim), data_(std::move(data)), index_(std::move(index)) {
  if (dim_ == 0) throw ShapeError("embedding dimension must be positive");
  if (data_.size() % dim_ != 0) throw ShapeError("embedding data is not a whole number of rows");
  const std::size_t rows = data_.size() / dim_;
  for (const auto& [tok, r] : index_) {
    if (r >= rows) throw DataError("embedding index row " + std::to_string(r) + " for '" + tok + "' out of range");
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw DataError("embedding table contains a non-finite value");
  }
}

WordEmbeddingTable WordEmbeddingTable::from_model(const text::Vocabulary& vocab, const nn::Tensor& embedding) {
  if (embedding.rows() != vocab.size()) throw ShapeError("embedding table does not match the vocabulary");
  std::vector<float> data;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = text::Vocabulary::kReservedCount; i < vocab.size(); ++i) {
    const auto row = embedding.row(i);
    index[vocab.token(i)] = index.size();
    data.insert(data.end(), row.begin(), row.end());
  }
  return WordEmbeddingTable(embedding.cols(), std::move(data), std::move(index));
}

std::span<const float> WordEmbeddingTable::vector(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return {};
  return std::span<const float>(data_).subspan(it->second * dim_, dim_);
}

WordEmbeddingTable WordEmbeddingTable::read(const std::filesystem::path& file, const std::filesystem::path& sidecar) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings " + file.string());
  char magic[4];
  std::uint32_t header[2];
  if (!in.read(magic, 4) || std::memcmp(magic, "EMBT", 4) != 0) {
    throw DataError(file.string() + " is not an EMBT embedding file");
  }
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) throw DataError("truncated header in " + file.string());
  std::vector<float> data(static_cast<std::size_t>(header[0]) * header[1]);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)))) {
    throw DataError("truncated embedding rows in " + file.string());
  }
  std::filesystem::path side = sidecar;
  if (side.empty()) side = file.string() + ".index.json";
  const auto j = nn::read_json_file(side);
  std::map<std::string, std::size_t> index;
  for (auto it = j.begin(); it != j.end(); ++it) index.emplace(it.key(), it.value().get<std::size_t>());
  return WordEmbeddingTable(header[1], std::move(data), std::move(index));
}

void WordEmbeddingTable::write(const std::filesystem::path& file, const std::filesystem::path& sidecar) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(dim_ ? data_.size() / dim_ : 0),
                                   static_cast<std::uint32_t>(dim_)};
  out.write("EMBT", 4);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(float)));
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [tok, r] : index_) j[tok] = r;
  nn::write_json_file(sidecar.empty() ? std::filesystem::path(file.string() + ".index.json") : sidecar, j);
}

namespace {

std::map<std::string, std::int64_t> bag_of_words(const text::Sentence& s, const WordEmbeddingTable& emb) {
  std::map<std::string, std::int64_t> bag;
  for (const auto& tok : s) {
    if (emb.contains(tok)) ++bag[tok];
  }
  return bag;
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

double wmd_distance(const text::Sentence& a, const text::Sentence& b, const WordEmbeddingTable& emb) {
  const auto bag_a = bag_of_words(a, emb);
  const auto bag_b = bag_of_words(b, emb);
  if (bag_a.empty() || bag_b.empty()) {
    throw UndefinedDistanceError("word mover's distance is undefined: no token of a sentence has an embedding");
  }
  std::int64_t n_a = 0;
  std::int64_t n_b = 0;
  for (const auto& [t, c] : bag_a) n_a += c;
  for (const auto& [t, c] : bag_b) n_b += c;
  // Weights c / n_a and d / n_b scaled by n_a * n_b become integers.
  std::vector<std::int64_t> supply;
  std::vector<std::int64_t> demand;
  for (const auto& [t, c] : bag_a) supply.push_back(c * n_b);
  for (const auto& [t, d] : bag_b) demand.push_back(d * n_a);
  std::vector<std::vector<double>> cost;
  for (const auto& [ta, ca] : bag_a) {
    auto& row = cost.emplace_back();
    for (const auto& [tb, cb] : bag_b) row.push_back(ta == tb ? 0.0 : euclidean(emb.vector(ta), emb.vector(tb)));
  }
  const TransportPlan plan = solve_transport(supply, demand, cost);
  return plan.cost / static_cast<double>(n_a * n_b);
}

SimilarityReport wmd_similarity_report(const CandidateSet& candidates, const ReferenceSet& refs,
                                       const WordEmbeddingTable& emb) {
  SimilarityReport report;
  double total = 0.0;
  for (const auto& [id, cand] : candidates) {
    const auto it = refs.find(id);
    if (it == refs.end() || it->second.empty()) throw DataError("no references for image '" + id + "'");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ref : it->second) {
      try {
        best = std::min(best, wmd_distance(cand, ref, emb));
      } catch (const UndefinedDistanceError&) {
      }
    }
    if (!std::isfinite(best)) {
      ++report.n_skipped;
      continue;
    }
    const double sim = std::exp(-best);
    report.per_image[id] = sim;
    total += sim;
    ++report.n_images;
  }
  if (report.n_skipped > 0) {
    std::cerr << "warning: " << report.n_skipped << " image(s) skipped, word mover's distance undefined\n";
  }
  report.value = report.n_images ? total / static_cast<double>(report.n_images)
                                 : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace captrans::metrics
