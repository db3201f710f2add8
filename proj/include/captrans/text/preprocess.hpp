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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace captrans::text {

/// Pseudo-word that replaces every all-digit token.
inline constexpr std::string_view kNumToken = "⟨num⟩";
/// Spelling of kNumToken in files.
inline constexpr std::string_view kNumTokenSerialized = "<num>";

using Sentence = std::vector<std::string>;

/// Lowercases, strips every character that is neither a letter nor an ASCII
/// digit, splits on whitespace and maps all-digit tokens to kNumToken.
/// Returns nullopt when nothing survives. Throws DataError on invalid UTF-8.
std::optional<Sentence> preprocess_sentence(std::string_view raw);

std::string join(const Sentence& s, std::string_view sep = " ");
/// Whitespace split without any normalisation.
Sentence split_tokens(std::string_view line);

std::string serialize_token(const std::string& token);
std::string deserialize_token(const std::string& token);
/// Space-joined with file spellings.
std::string serialize_sentence(const Sentence& s);
Sentence deserialize_sentence(std::string_view line);

}  // namespace captrans::text
