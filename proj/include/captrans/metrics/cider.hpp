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

#include <map>
#include <string>
#include <vector>

#include "captrans/text/dataset.hpp"

namespace captrans::metrics {

/// image_id -> reference captions.
using ReferenceSet = std::map<std::string, std::vector<text::Sentence>>;
/// image_id -> candidate caption.
using CandidateSet = std::map<std::string, text::Sentence>;

/// References of every item in one split.
ReferenceSet references(const text::CaptionDataset& dataset, text::Split split);

struct CiderResult {
  double score = 0.0;  // mean over images
  std::map<std::string, double> per_image;
};

/// CIDEr with n = 1..4 and uniform n weights. Document frequencies are counted
/// over the reference sets of the scored images; idf = log(N) - log(max(1, df)).
/// Per n, the candidate's tf-idf vector is compared with each reference by
/// cosine; the score averages over n and references and is scaled by 10.
/// DataError if a candidate has no references.
CiderResult cider_score(const CandidateSet& candidates, const ReferenceSet& refs);

}  // namespace captrans::metrics
