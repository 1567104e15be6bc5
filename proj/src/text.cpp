// Copyright 2026 The Linesmith Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "linesmith/text.hpp"

#include <algorithm>

namespace linesmith {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
         c == 0x00A0 || c == 0x3000 || (c >= 0x2000 && c <= 0x200A);
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2019 || c == 0x2018 || c == 0x02BC; }

// Letters, digits and any non-ASCII code point outside the common
// punctuation blocks.
bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
  }
  if (c == 0x00A1 || c == 0x00BF || c == 0x00AB || c == 0x00BB || c == 0x00B7) return false;
  if (c >= 0x2000 && c <= 0x206F) return false;  // general punctuation
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c == 0xFEFF) return false;
  return true;
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  // Latin-1 supplement capitals, skipping the multiplication sign.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    }
    bool valid = len == 1 ? b0 < 0x80 : i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        valid = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!valid) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view text) { return utf8_decode(text).size(); }

std::string normalize_token(std::string_view raw) {
  std::u32string cps = utf8_decode(raw);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && !is_word_char(cps[begin])) ++begin;
  while (end > begin && !is_word_char(cps[end - 1])) --end;
  std::u32string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const char32_t c = cps[i];
    out.push_back(is_apostrophe(c) ? U'\'' : to_lower(c));
  }
  return utf8_encode(out);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  const std::u32string cps = utf8_decode(text);
  std::u32string current;
  for (char32_t c : cps) {
    if (is_space(c)) {
      if (!current.empty()) out.push_back(utf8_encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(utf8_encode(current));
  return out;
}

std::vector<std::string> tokenize_line(std::string_view line) {
  std::vector<std::string> out;
  for (const auto& raw : split_whitespace(line)) {
    std::string tok = normalize_token(raw);
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

std::string final_word(std::string_view line) {
  const auto raw = split_whitespace(line);
  for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
    std::string tok = normalize_token(*it);
    if (!tok.empty()) return tok;
  }
  return {};
}

std::string sanitize_line(std::string_view line) {
  std::string cleaned(line);
  for (std::string_view marker : {std::string_view("[LINE]"), std::string_view("[RHYME]")}) {
    for (auto pos = cleaned.find(marker); pos != std::string::npos; pos = cleaned.find(marker)) {
      cleaned.replace(pos, marker.size(), " ");
    }
  }
  std::string out;
  for (const auto& word : split_whitespace(cleaned)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  });
  return out;
}

std::string_view trim(std::string_view text) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  const auto b = std::find_if(text.begin(), text.end(), not_space);
  const auto e = std::find_if(text.rbegin(), text.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view();
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace linesmith
