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
#include <string>
#include <vector>

#include "captrans/capgen/caption_generator.hpp"
#include "captrans/text/dataset.hpp"

namespace captrans::capgen {

struct GeneratedCaption {
  std::string image_id;
  text::Sentence caption;
  double log_prob = 0.0;
  bool complete = false;
};

/// Beam-search captions for `items`, in item order.
std::vector<GeneratedCaption> generate_captions(const CaptionGenerator& model,
                                                std::span<const text::CaptionItem* const> items,
                                                const text::FeatureStore& features,
                                                const GenerationConfig& config);

/// One JSON object per line: {"image_id", "caption", "logprob"}.
void write_generations(const std::filesystem::path& file, const std::vector<GeneratedCaption>& captions);
std::vector<GeneratedCaption> read_generations(const std::filesystem::path& file);

/// image_id -> caption, the input shape the metrics expect.
std::map<std::string, text::Sentence> as_candidates(const std::vector<GeneratedCaption>& captions);

}  // namespace captrans::capgen
