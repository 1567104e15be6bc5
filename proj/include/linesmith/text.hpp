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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace linesmith {

std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
// Length in code points. Invalid bytes count as one code point each.
std::size_t utf8_length(std::string_view text);

/// Lowercases and strips surrounding punctuation. Internal apostrophes and
/// hyphens survive; typographic apostrophes become `'`. Returns an empty
/// string for punctuation-only input.
std::string normalize_token(std::string_view raw);

std::vector<std::string> split_whitespace(std::string_view text);

/// Normalized, non-empty tokens of a line.
std::vector<std::string> tokenize_line(std::string_view line);

/// Normalized final word of a line, skipping trailing punctuation-only tokens.
std::string final_word(std::string_view line);

/// Replaces tabs and newlines with spaces, collapses whitespace runs, trims,
/// and removes the reserved `[LINE]` / `[RHYME]` markers so a line can be
/// embedded in a rendered model input and in a TSV cell.
std::string sanitize_line(std::string_view line);

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace linesmith
