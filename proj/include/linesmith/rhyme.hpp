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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "linesmith/execution.hpp"
#include "linesmith/phonetics.hpp"

namespace linesmith {

/// Phonemes from the last stressed nucleus to the end of the word.
struct RhymeKey {
  std::vector<std::string> suffix;
  bool operator==(const RhymeKey&) const = default;
};

enum class RhymeClass { None = 0, Near = 1, Perfect = 2 };

std::string_view to_string(RhymeClass c);

/// Last primary-stressed nucleus (else last stressed, else last nucleus)
/// through the end. Throws NoNucleus when the sequence has no vowel.
RhymeKey rhyme_key(const PhonemeSequence& seq);

/// Near-rhyme equivalence table. Text format:
///
///   version 1
///   [vowel_classes]      one class per line, representative first
///   [consonant_pairs]    same, for consonants
///   [deletable_codas]    one phoneme per line
///   [options]            ignore_internal_consonants
class EquivalenceTable {
 public:
  static EquivalenceTable parse(std::istream& in);
  static EquivalenceTable load(const std::filesystem::path& path);
  // The table shipped in data/near_rhyme_table.txt.
  static EquivalenceTable builtin();

  std::string representative(const std::string& phoneme) const;
  bool deletable(const std::string& representative) const;
  bool ignore_internal_consonants() const { return ignore_internal_consonants_; }
  int version() const { return version_; }

  // Canonical comparison form of a key: class representatives, with
  // consonants between nuclei dropped when the option is set.
  std::vector<std::string> canonical(const RhymeKey& key) const;

  // `canonical` plus, if its final phoneme is a deletable coda and a vowel
  // remains, the form without it.
  std::vector<std::vector<std::string>> variants(const std::vector<std::string>& canonical) const;

  std::set<std::string> deletable_representatives() const;

  // Builders used by tests that loosen or tighten a table.
  void add_class(const std::vector<std::string>& members);
  void add_deletable(const std::string& phoneme);
  void set_ignore_internal_consonants(bool on) { ignore_internal_consonants_ = on; }

 private:
  std::unordered_map<std::string, std::string> representative_;
  std::set<std::string> deletable_;
  bool ignore_internal_consonants_ = false;
  int version_ = 1;
};

std::string join_key(const std::vector<std::string>& phonemes);

class RhymeClassifier {
 public:
  RhymeClassifier(std::shared_ptr<const Phonemizer> phonemizer, EquivalenceTable table);

  RhymeClass classify_keys(const RhymeKey& a, const RhymeKey& b) const;
  /// Throws UnresolvableWord / NoNucleus for words that cannot be keyed.
  RhymeClass classify(std::string_view a, std::string_view b) const;
  // None for words that cannot be keyed.
  RhymeClass classify_or_none(std::string_view a, std::string_view b) const;

  RhymeKey key_of(std::string_view word) const;
  std::optional<RhymeKey> try_key_of(std::string_view word) const;
  std::string bucket_of(const RhymeKey& key) const;

  const Phonemizer& phonemizer() const { return *phonemizer_; }
  const EquivalenceTable& table() const { return table_; }

 private:
  std::shared_ptr<const Phonemizer> phonemizer_;
  EquivalenceTable table_;
};

struct RankedWord {
  std::string word;
  std::uint64_t frequency = 0;
  bool operator==(const RankedWord&) const = default;
};

/// Words bucketed by canonical rhyme key, with corpus frequencies.
/// Immutable after construction; safe for concurrent reads.
class RhymeDictionary {
 public:
  explicit RhymeDictionary(std::shared_ptr<const RhymeClassifier> classifier);

  /// Buckets every distinct normalized word of `lines`; frequency is the
  /// total occurrence count. Words that cannot be keyed are counted in
  /// skipped().
  static RhymeDictionary build(std::shared_ptr<const RhymeClassifier> classifier,
                               const std::vector<std::string>& lines,
                               Execution exec = Execution::Serial);

  // Adds `frequency` occurrences of a word. Returns false if it has no key.
  bool add(std::string_view word, std::uint64_t frequency = 1);

  /// Up to k rhymes (Near or Perfect) of `word`, excluding the word itself,
  /// by descending frequency then lexicographically. Throws UnknownWord if
  /// the query cannot be keyed.
  std::vector<RankedWord> top_rhymes(std::string_view word, std::size_t k = 8) const;

  // Every rhyme of `word` in the dictionary, in top_rhymes order.
  std::vector<RankedWord> rhymes_of(std::string_view word) const;

  const std::map<std::string, std::map<std::string, std::uint64_t>>& buckets() const {
    return buckets_;
  }
  std::uint64_t frequency(std::string_view word) const;
  std::optional<std::string> bucket_of_word(std::string_view word) const;
  std::size_t word_count() const { return word_bucket_.size(); }
  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t skipped() const { return skipped_; }
  const RhymeClassifier& classifier() const { return *classifier_; }

 private:
  std::shared_ptr<const RhymeClassifier> classifier_;
  std::map<std::string, std::map<std::string, std::uint64_t>> buckets_;
  std::unordered_map<std::string, std::string> word_bucket_;
  std::unordered_map<std::string, RhymeKey> word_key_;
  std::size_t skipped_ = 0;
};

}  // namespace linesmith
