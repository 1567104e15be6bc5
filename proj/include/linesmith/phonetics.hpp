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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace linesmith {

enum class PhonemeSource { Engine, Dictionary, Fallback };

std::string_view to_string(PhonemeSource source);

struct StressMark {
  std::size_t index = 0;
  bool primary = true;
  bool operator==(const StressMark&) const = default;
};

/// IPA phonemes of one word. Stress marks are stored separately from the
/// symbols and always point at vowel-class phonemes.
struct PhonemeSequence {
  std::vector<std::string> phonemes;
  std::vector<StressMark> stress;
  PhonemeSource source = PhonemeSource::Dictionary;

  std::vector<std::size_t> stress_indices() const;
  std::vector<std::size_t> nucleus_indices() const;
  std::size_t nucleus_count() const;
  // Space-separated symbols with ˈ / ˌ prefixes, i.e. the dictionary format.
  std::string to_ipa() const;

  bool operator==(const PhonemeSequence&) const = default;
};

bool is_vowel(std::string_view phoneme);

/// Parses `ˈk æ t`-style text. A nucleus-less stress mark is a ParseError;
/// when no stress is marked the last nucleus becomes primary.
PhonemeSequence parse_pronunciation(std::string_view ipa, PhonemeSource source);

/// Orthographic fallback for out-of-vocabulary words: one vowel phoneme per
/// maximal vowel-letter group, a silent final `e` dropped, at least one
/// nucleus.
PhonemeSequence orthographic_fallback(std::string_view word);

/// Bundled pronouncing dictionary: `word<TAB>IPA` per line. Entries are
/// parsed lazily on lookup.
class PronouncingDictionary {
 public:
  static PronouncingDictionary load(const std::filesystem::path& path);
  static PronouncingDictionary parse(std::istream& in);

  std::optional<PhonemeSequence> lookup(std::string_view word) const;
  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  void insert(std::string word, std::string ipa);

 private:
  std::unordered_map<std::string, std::string> entries_;
};

/// External grapheme-to-phoneme engine. Implementations return the
/// pronunciation in dictionary format, or nothing if the word is unknown.
class G2pEngine {
 public:
  virtual ~G2pEngine() = default;
  virtual std::optional<std::string> pronounce(const std::string& word) = 0;
  virtual std::string name() const = 0;
};

/// Runs a shell command per word. `{word}` in the template is replaced by
/// the (shell-quoted) word; the first output line is taken as the IPA.
class SubprocessEngine final : public G2pEngine {
 public:
  explicit SubprocessEngine(std::string command_template);
  std::optional<std::string> pronounce(const std::string& word) override;
  std::string name() const override { return "subprocess"; }

 private:
  std::string template_;
  std::mutex mutex_;
};

struct PhonemizerConfig {
  // Which source wins when both resolve a word.
  bool engine_first = false;
  bool fallback_enabled = true;
  bool cache_enabled = true;
};

struct CacheStats {
  std::size_t entries = 0;
  std::size_t hits = 0;
  std::size_t misses = 0;
};

/// Append-only word -> sequence cache. Concurrent reads, serialized writes.
class PhonemeCache {
 public:
  std::optional<PhonemeSequence> find(const std::string& word) const;
  // Keeps the first stored sequence if the word is already present.
  PhonemeSequence store(const std::string& word, PhonemeSequence seq);
  CacheStats stats() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, PhonemeSequence> entries_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

class Phonemizer {
 public:
  Phonemizer(std::shared_ptr<const PronouncingDictionary> dictionary,
             std::shared_ptr<G2pEngine> engine = nullptr, PhonemizerConfig config = {});

  /// Normalizes `word` and resolves it through engine / dictionary /
  /// fallback. Throws UnresolvableWord if nothing resolves.
  PhonemeSequence phonemize(std::string_view word) const;

  // Non-throwing variant.
  std::optional<PhonemeSequence> try_phonemize(std::string_view word) const;

  std::size_t syllables(std::string_view word) const;
  std::size_t line_syllables(std::string_view line) const;

  const PhonemizerConfig& config() const { return config_; }
  CacheStats cache_stats() const { return cache_->stats(); }
  std::size_t dictionary_size() const { return dictionary_ ? dictionary_->size() : 0; }

 private:
  std::optional<PhonemeSequence> resolve(const std::string& word) const;
  std::optional<PhonemeSequence> resolve_direct(const std::string& word) const;

  std::shared_ptr<const PronouncingDictionary> dictionary_;
  std::shared_ptr<G2pEngine> engine_;
  PhonemizerConfig config_;
  std::unique_ptr<PhonemeCache> cache_;
};

}  // namespace linesmith
