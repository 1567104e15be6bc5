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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "linesmith/backend.hpp"
#include "linesmith/rhyme.hpp"
#include "linesmith/rng.hpp"

namespace linesmith {

inline constexpr std::size_t kDefaultCandidates = 5;
inline constexpr std::size_t kMaxSyllableAttempts = 5;
inline constexpr std::size_t kForceRhymeWidth = 8;

struct SuggestionRequest {
  std::vector<std::string> input_lines;
  std::optional<int> syllable_target;  // hard constraint when set
  std::optional<std::string> ending_word;
  bool force_rhyme = false;
  std::size_t k = kDefaultCandidates;

  /// Throws ConstraintConflict for ending_word + force_rhyme and
  /// InvalidRequest for other malformed requests.
  void validate() const;
};

struct ConstraintReport {
  std::size_t syllables = 0;
  int syllable_target = 0;
  int syllable_distance = 0;
  std::string end_word;
  std::optional<std::string> required_end_word;
  bool end_word_match = true;  // vacuously true without a required word
  RhymeClass rhyme_class = RhymeClass::None;
  std::string rhymes_with;  // best-matching input end word, empty for None
};

struct Candidate {
  std::string line;
  std::string query;
  ConstraintReport report;
  std::size_t attempts = 1;
};

struct SuggestionSet {
  std::vector<Candidate> candidates;
  std::vector<std::string> queries;
  std::vector<std::string> advisories;
  int syllable_target = 0;
  bool syllable_target_derived = false;
  std::size_t backend_calls = 0;
};

/// Rounded (half to even) mean syllable count of the lines, at least 1.
int derive_syllable_target(const Phonemizer& phonemizer, const std::vector<std::string>& lines);

/// The query for a plain or ending-word request. Plain requests use the
/// rhyme task with [RHYME] on every input line whose end word rhymes with
/// the last line's end word.
std::string build_query(const SuggestionRequest& request, const RhymeClassifier& classifier);

/// One ending-word query per top rhyme of the last input word. An empty
/// result comes with a note in `advisories`.
std::vector<std::string> force_rhyme_queries(const SuggestionRequest& request,
                                             const RhymeDictionary& dictionary,
                                             std::vector<std::string>* advisories = nullptr,
                                             std::size_t width = kForceRhymeWidth);

/// Recomputes every constraint from the line text.
ConstraintReport check_constraints(const std::string& line, const SuggestionRequest& request,
                                   int syllable_target, const RhymeClassifier& classifier);

struct SuggestOptions {
  std::size_t max_attempts = kMaxSyllableAttempts;
  std::size_t force_rhyme_width = kForceRhymeWidth;
};

class Suggester {
 public:
  explicit Suggester(std::shared_ptr<const RhymeDictionary> dictionary, SuggestOptions options = {});

  /// At most k candidates per query. With a user syllable target each
  /// candidate is re-sampled until it hits the target or the attempt budget
  /// runs out; the closest attempt is kept. Ranked by end-word match,
  /// syllable distance, rhyme class, then backend order.
  SuggestionSet suggest(const SuggestionRequest& request, GenerationBackend& backend,
                        Rng& rng) const;

  const SuggestOptions& options() const { return options_; }

 private:
  std::shared_ptr<const RhymeDictionary> dictionary_;
  SuggestOptions options_;
};

}  // namespace linesmith
