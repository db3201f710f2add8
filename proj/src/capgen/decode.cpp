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

#include "captrans/capgen/decode.hpp"

#include <fstream>

#include "captrans/errors.hpp"
#include "json.hpp"

namespace captrans::capgen {

std::vector<GeneratedCaption> generate_captions(const CaptionGenerator& model,
                                                std::span<const text::CaptionItem* const> items,
                                                const text::FeatureStore& features,
                                                const GenerationConfig& config) {
  config.validate();
  std::vector<GeneratedCaption> out;
  out.reserve(items.size());
  for (const auto* item : items) {
    const Hypothesis h = generate_caption(model, features.features(item->image_id), config);
    GeneratedCaption g;
    g.image_id = item->image_id;
    g.caption = text::decode_sentence(h.tokens, model.vocab());
    g.log_prob = h.log_prob;
    g.complete = h.complete;
    out.push_back(std::move(g));
  }
  return out;
}

void write_generations(const std::filesystem::path& file, const std::vector<GeneratedCaption>& captions) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  for (const auto& c : captions) {
    const nlohmann::json j = {{"image_id", c.image_id},
                              {"caption", text::serialize_sentence(c.caption)},
                              {"logprob", c.log_prob}};
    out << j.dump() << '\n';
  }
}

std::vector<GeneratedCaption> read_generations(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  std::vector<GeneratedCaption> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      GeneratedCaption g;
      g.image_id = j.at("image_id").get<std::string>();
      g.caption = text::deserialize_sentence(j.at("caption").get<std::string>());
      g.log_prob = j.value("logprob", 0.0);
      g.complete = true;
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, text::Sentence> as_candidates(const std::vector<GeneratedCaption>& captions) {
  std::map<std::string, text::Sentence> out;
  for (const auto& c : captions) out[c.image_id] = c.caption;
  return out;
}

}  // namespace captrans::capgen
