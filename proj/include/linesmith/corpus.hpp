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
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "linesmith/execution.hpp"

namespace linesmith {

struct Verse {
  std::vector<std::string> lines;
  // Total code points over all lines, separators excluded.
  std::size_t char_length() const;
  bool operator==(const Verse&) const = default;
};

struct Song {
  std::string id;
  std::string artist;
  std::string title;
  std::optional<std::string> language_tag;
  std::vector<Verse> verses;
  bool operator==(const Song&) const = default;
};

struct Corpus {
  std::vector<Song> songs;
  std::size_t verse_count() const;
  std::vector<std::string> all_lines() const;
  bool operator==(const Corpus&) const = default;
};

/// Reads one JSON record per line:
///   {"id", "artist", "title", "language_tag"?, "verses": [[line, ...] | {"lines": [...]}, ...]}
/// Lines are sanitized on ingest and blank lines dropped. Throws ParseError
/// (with the 1-based record index) on malformed records or duplicate ids,
/// EmptyCorpus when there are no records.
Corpus parse_corpus(std::istream& in);
Corpus ingest(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Ratcliff/Obershelp ratio 2M/T with the matching-block rules of Python's
/// difflib.SequenceMatcher (autojunk on), over code points. 1.0 when both
/// strings are empty.
double gestalt_similarity(std::string_view a, std::string_view b);

/// Drops every line whose similarity to the most recently kept line is
/// strictly greater than `threshold`.
Verse dedup_consecutive(const Verse& verse, double threshold = 0.70);

struct FilterRules {
  double dedup_threshold = 0.70;
  std::size_t min_verse_lines = 6;
  std::size_t min_verse_chars = 50;
  double stopword_floor = 0.20;
};

struct PreprocessStats {
  std::size_t songs_in = 0;
  std::size_t verses_in = 0;
  std::size_t songs_dropped_language = 0;
  std::size_t lines_dropped_dedup = 0;
  std::size_t verses_dropped_line_count = 0;
  std::size_t verses_dropped_char_count = 0;
  std::size_t songs_dropped_empty = 0;
  std::size_t songs_out = 0;
  std::size_t verses_out = 0;

  std::size_t total_drops() const {
    return songs_dropped_language + lines_dropped_dedup + verses_dropped_line_count +
           verses_dropped_char_count + songs_dropped_empty;
  }
};

/// Keeps verses with at least `min_verse_lines` lines and `min_verse_chars`
/// characters; drops songs left without verses.
Corpus filter_verses(const Corpus& corpus, const FilterRules& rules = {},
                     PreprocessStats* stats = nullptr);

class StopwordList {
 public:
  static StopwordList builtin();
  static StopwordList load(const std::filesystem::path& path);
  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

bool is_english_tag(std::string_view tag);

// Fraction of a song's tokens that are stopwords.
double stopword_ratio(const Song& song, const StopwordList& stopwords);

/// English-tagged songs are kept and other tags dropped; untagged songs are
/// kept when their stopword ratio exceeds `floor`.
Corpus filter_language(const Corpus& corpus, const StopwordList& stopwords, double floor,
                       PreprocessStats* stats = nullptr);

/// Language filter, then per-verse dedup, then the verse filters. The
/// parallel path fans out over songs and keeps input order.
Corpus preprocess(const Corpus& corpus, const FilterRules& rules, const StopwordList& stopwords,
                  PreprocessStats* stats = nullptr, Execution exec = Execution::Serial);

struct SplitConfig {
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  std::set<std::string> deny_artists;
  std::set<std::string> allow_artists;
};

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Partitions songs into train and test. Deny-listed artists are removed;
/// songs by allow-listed artists from `replacements` are added before the
/// shuffle. Test size is round(fraction * n), kept within [1, n-1] when
/// n >= 2. Throws EmptyCorpus when no songs remain.
CorpusSplit split_by_song(const Corpus& corpus, const SplitConfig& cfg,
                          const Corpus* replacements = nullptr);

}  // namespace linesmith
