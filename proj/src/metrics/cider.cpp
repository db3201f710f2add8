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

#include "captrans/metrics/cider.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "captrans/errors.hpp"

namespace captrans::metrics {
namespace {

constexpr std::size_t kMaxN = 4;

using NgramCounts = std::map<std::vector<std::string>, double>;

NgramCounts count_ngrams(const text::Sentence& s) {
  NgramCounts counts;
  for (std::size_t n = 1; n <= kMaxN; ++n) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      counts[std::vector<std::string>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                      s.begin() + static_cast<std::ptrdiff_t>(i + n))] += 1.0;
    }
  }
  return counts;
}

struct TfIdf {
  std::array<std::map<std::vector<std::string>, double>, kMaxN> vec;
  std::array<double, kMaxN> norm{};
};

TfIdf tf_idf(const NgramCounts& counts, const std::map<std::vector<std::string>, double>& df, double log_n) {
  TfIdf out;
  for (const auto& [gram, tf] : counts) {
    const std::size_t n = gram.size() - 1;
    const auto it = df.find(gram);
    const double d = std::log(std::max(1.0, it == df.end() ? 0.0 : it->second));
    const double w = tf * (log_n - d);
    out.vec[n][gram] = w;
    out.norm[n] += w * w;
  }
  for (double& v : out.norm) v = std::sqrt(v);
  return out;
}

}  // namespace

ReferenceSet references(const text::CaptionDataset& dataset, text::Split split) {
  ReferenceSet refs;
  for (const auto* item : dataset.items_in(split)) refs[item->image_id] = item->captions;
  return refs;
}

CiderResult cider_score(const CandidateSet& candidates, const ReferenceSet& refs) {
  CiderResult result;
  if (candidates.empty()) return result;

  std::map<std::string, std::vector<NgramCounts>> ref_counts;
  std::map<std::vector<std::string>, double> df;
  for (const auto& [id, cand] : candidates) {
    const auto it = refs.find(id);
    if (it == refs.end() || it->second.empty()) throw DataError("no references for image '" + id + "'");
    auto& counts = ref_counts[id];
    std::set<std::vector<std::string>> seen;
    for (const auto& r : it->second) {
      counts.push_back(count_ngrams(r));
      for (const auto& [gram, c] : counts.back()) seen.insert(gram);
    }
    for (const auto& gram : seen) df[gram] += 1.0;
  }
  const double log_n = std::log(static_cast<double>(candidates.size()));

  double total = 0.0;
  for (const auto& [id, cand] : candidates) {
    const TfIdf hyp = tf_idf(count_ngrams(cand), df, log_n);
    const auto& counts = ref_counts.at(id);
    std::array<double, kMaxN> sum{};
    for (const auto& rc : counts) {
      const TfIdf ref = tf_idf(rc, df, log_n);
      for (std::size_t n = 0; n < kMaxN; ++n) {
        double dot = 0.0;
        for (const auto& [gram, w] : hyp.vec[n]) {
          const auto r = ref.vec[n].find(gram);
          if (r != ref.vec[n].end()) dot += w * r->second;
        }
        if (hyp.norm[n] != 0.0 && ref.norm[n] != 0.0) dot /= hyp.norm[n] * ref.norm[n];
        sum[n] += dot;
      }
    }
    double mean = 0.0;
    for (double v : sum) mean += v;
    mean /= static_cast<double>(kMaxN);
    const double score = mean / static_cast<double>(counts.size()) * 10.0;
    result.per_image[id] = score;
    total += score;
  }
  result.score = total / static_cast<double>(candidates.size());
  return result;
}

}  // namespace captrans::metrics
