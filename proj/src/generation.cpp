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

#include "linesmith/generation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "linesmith/dataset.hpp"
#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

void SuggestionRequest::validate() const {
  if (ending_word && force_rhyme) {
    throw ConstraintConflict("ending_word and force_rhyme cannot be combined");
  }
  if (input_lines.empty() || input_lines.size() > kMaxInputLines) {
    throw InvalidRequest("between 1 and " + std::to_string(kMaxInputLines) +
                         " input lines are required");
  }
  for (const auto& line : input_lines) {
    if (sanitize_line(line).empty()) throw InvalidRequest("input lines must not be blank");
  }
  if (k == 0) throw InvalidRequest("k must be at least 1");
  if (syllable_target && *syllable_target < 1) {
    throw InvalidRequest("syllable target must be at least 1");
  }
  if (ending_word && normalize_token(*ending_word).empty()) {
    throw InvalidRequest("ending word has no letters");
  }
}

int derive_syllable_target(const Phonemizer& phonemizer, const std::vector<std::string>& lines) {
  if (lines.empty()) return 1;
  double total = 0;
  for (const auto& l : lines) total += static_cast<double>(phonemizer.line_syllables(l));
  const double mean = total / static_cast<double>(lines.size());
  return std::max(1, static_cast<int>(std::nearbyint(mean)));
}

namespace {

std::vector<std::string> clean_lines(const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(sanitize_line(l));
  return out;
}

TrainingExample base_query(const SuggestionRequest& request, const Phonemizer& phonemizer) {
  TrainingExample q;
  q.input_lines = clean_lines(request.input_lines);
  q.syllable_tag = request.syllable_target
                       ? *request.syllable_target
                       : derive_syllable_target(phonemizer, q.input_lines);
  return q;
}

std::string ending_query(TrainingExample q, const std::string& word) {
  q.task = Task::Ending;
  q.ending_word_tag = word;
  return render_input(q);
}

}  // namespace

std::string build_query(const SuggestionRequest& request, const RhymeClassifier& classifier) {
  TrainingExample q = base_query(request, classifier.phonemizer());
  if (request.ending_word) return ending_query(std::move(q), normalize_token(*request.ending_word));
  q.task = Task::Rhyme;
  const std::string last = final_word(q.input_lines.back());
  q.rhyme_flags.assign(q.input_lines.size(), false);
  if (!last.empty()) {
    const RhymeKey last_key = classifier.key_of(last);
    for (std::size_t i = 0; i < q.input_lines.size(); ++i) {
      const auto key = classifier.try_key_of(final_word(q.input_lines[i]));
      q.rhyme_flags[i] = key && classifier.classify_keys(*key, last_key) != RhymeClass::None;
    }
  }
  return render_input(q);
}

std::vector<std::string> force_rhyme_queries(const SuggestionRequest& request,
                                             const RhymeDictionary& dictionary,
                                             std::vector<std::string>* advisories,
                                             std::size_t width) {
  const std::string last = final_word(sanitize_line(request.input_lines.back()));
  const auto rhymes = dictionary.top_rhymes(last, width);
  std::vector<std::string> out;
  if (rhymes.empty()) {
    if (advisories) advisories->push_back("no rhymes known for \"" + last + "\"");
    return out;
  }
  const TrainingExample q = base_query(request, dictionary.classifier().phonemizer());
  out.reserve(rhymes.size());
  for (const auto& r : rhymes) out.push_back(ending_query(q, r.word));
  return out;
}

ConstraintReport check_constraints(const std::string& line, const SuggestionRequest& request,
                                   int syllable_target, const RhymeClassifier& classifier) {
  ConstraintReport r;
  r.syllables = classifier.phonemizer().line_syllables(line);
  r.syllable_target = syllable_target;
  r.syllable_distance = std::abs(static_cast<int>(r.syllables) - syllable_target);
  r.end_word = final_word(line);
  if (request.ending_word) {
    r.required_end_word = normalize_token(*request.ending_word);
    r.end_word_match = r.end_word == *r.required_end_word;
  }
  const auto key = classifier.try_key_of(r.end_word);
  if (!key) return r;
  for (const auto& input : request.input_lines) {
    const std::string w = final_word(input);
    const auto other = classifier.try_key_of(w);
    if (!other) continue;
    const RhymeClass c = classifier.classify_keys(*key, *other);
    if (c > r.rhyme_class) {
      r.rhyme_class = c;
      r.rhymes_with = w;
    }
  }
  return r;
}

Suggester::Suggester(std::shared_ptr<const RhymeDictionary> dictionary, SuggestOptions options)
    : dictionary_(std::move(dictionary)), options_(options) {
  if (options_.max_attempts == 0) options_.max_attempts = 1;
}

SuggestionSet Suggester::suggest(const SuggestionRequest& request, GenerationBackend& backend,
                                 Rng& rng) const {
  request.validate();
  const RhymeClassifier& classifier = dictionary_->classifier();
  SuggestionSet set;
  set.syllable_target_derived = !request.syllable_target;
  set.syllable_target = request.syllable_target
                            ? *request.syllable_target
                            : derive_syllable_target(classifier.phonemizer(),
                                                     clean_lines(request.input_lines));
  if (request.force_rhyme) {
    set.queries = force_rhyme_queries(request, *dictionary_, &set.advisories,
                                      options_.force_rhyme_width);
  }
  if (set.queries.empty()) set.queries.push_back(build_query(request, classifier));

  const bool hard_target = request.syllable_target.has_value();
  for (const auto& query : set.queries) {
    auto lines = backend.generate(query, request.k, rng);
    ++set.backend_calls;
    if (lines.size() > request.k) lines.resize(request.k);
    for (auto& line : lines) {
      Candidate c{line, query, check_constraints(line, request, set.syllable_target, classifier), 1};
      while (hard_target && c.report.syllable_distance > 0 && c.attempts < options_.max_attempts) {
        auto retry = backend.generate(query, 1, rng);
        ++set.backend_calls;
        ++c.attempts;
        if (retry.empty()) continue;
        auto report = check_constraints(retry.front(), request, set.syllable_target, classifier);
        if (report.syllable_distance < c.report.syllable_distance) {
          c.line = std::move(retry.front());
          c.report = std::move(report);
        }
      }
      set.candidates.push_back(std::move(c));
    }
  }
  std::stable_sort(set.candidates.begin(), set.candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.report.end_word_match != b.report.end_word_match) {
                       return a.report.end_word_match;
                     }
                     if (a.report.syllable_distance != b.report.syllable_distance) {
                       return a.report.syllable_distance < b.report.syllable_distance;
                     }
                     return a.report.rhyme_class > b.report.rhyme_class;
                   });
  return set;
}

}  // namespace linesmith
