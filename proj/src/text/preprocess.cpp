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

#include "captrans/text/preprocess.hpp"

#include <cctype>
#include <locale>

#include "captrans/errors.hpp"

namespace captrans::text {

namespace {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw DataError("invalid UTF-8 lead byte");
    }
    if (i + len > s.size()) throw DataError("truncated UTF-8 sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) throw DataError("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw DataError("invalid UTF-8 code point");
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Letter classification and case mapping for non-ASCII code points come from
// the C.UTF-8 locale when the system provides it; otherwise only ASCII
// letters are recognised.
class CharClass {
 public:
  CharClass() {
    try {
      locale_ = std::locale("C.UTF-8");
      facet_ = &std::use_facet<std::ctype<wchar_t>>(locale_);
    } catch (const std::runtime_error&) {
      facet_ = nullptr;
    }
  }

  bool is_letter(char32_t c) const {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    return facet_ != nullptr && facet_->is(std::ctype_base::alpha, static_cast<wchar_t>(c));
  }

  char32_t lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    return facet_ != nullptr ? static_cast<char32_t>(facet_->tolower(static_cast<wchar_t>(c))) : c;
  }

  static bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
           c == 0x00A0 || c == 0x3000 || (c >= 0x2000 && c <= 0x200A);
  }

 private:
  std::locale locale_;
  const std::ctype<wchar_t>* facet_ = nullptr;
};

const CharClass& char_class() {
  static const CharClass cc;
  return cc;
}

}  // namespace

std::optional<Sentence> preprocess_sentence(std::string_view raw) {
  const std::u32string cps = decode_utf8(raw);
  const CharClass& cc = char_class();
  Sentence out;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && CharClass::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !CharClass::is_space(cps[j])) ++j;
    if (j == i) break;
    std::string word;
    bool all_digits = true;
    bool keep_literal = false;
    {
      std::string piece;
      for (std::size_t k = i; k < j; ++k) append_utf8(piece, cps[k]);
      keep_literal = (piece == kNumToken);
    }
    if (keep_literal) {
      out.emplace_back(kNumToken);
    } else {
      for (std::size_t k = i; k < j; ++k) {
        const char32_t c = cps[k];
        if (c >= '0' && c <= '9') {
          word.push_back(static_cast<char>(c));
        } else if (cc.is_letter(c)) {
          all_digits = false;
          append_utf8(word, cc.lower(c));
        }
      }
      if (!word.empty()) out.push_back(all_digits ? std::string(kNumToken) : std::move(word));
    }
    i = j;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string join(const Sentence& s, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += sep;
    out += s[i];
  }
  return out;
}

Sentence split_tokens(std::string_view line) {
  Sentence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string serialize_token(const std::string& token) {
  return token == kNumToken ? std::string(kNumTokenSerialized) : token;
}

std::string deserialize_token(const std::string& token) {
  return token == kNumTokenSerialized ? std::string(kNumToken) : token;
}

std::string serialize_sentence(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += serialize_token(s[i]);
  }
  return out;
}

Sentence deserialize_sentence(std::string_view line) {
  Sentence s = split_tokens(line);
  for (auto& t : s) t = deserialize_token(t);
  return s;
}

}  // namespace captrans::text
