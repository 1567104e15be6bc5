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
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linesmith/backend.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/execution.hpp"
#include "linesmith/rhyme.hpp"

namespace linesmith {

struct BleuConfig {
  int max_order = 4;
  double epsilon = 0.1;  // replaces a zero match count
};

/// Clipped n-gram statistics of one hypothesis/reference pair.
struct BleuStats {
  std::vector<std::uint64_t> matches;  // index n-1
  std::vector<std::uint64_t> totals;
  std::uint64_t hypothesis_length = 0;
  std::uint64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(const std::vector<std::string>& hypothesis,
                     const std::vector<std::string>& reference, int max_order = 4);

/// Score in [0,100] from accumulated statistics. Orders with no n-grams in
/// any hypothesis are left out and the remaining weights renormalized; no
/// unigram match gives 0.
double bleu_from_stats(const BleuStats& stats, const BleuConfig& config = {});

/// Corpus BLEU over normalized tokens with a corpus-level brevity penalty.
/// Throws LengthMismatch for unequal or empty lists.
double corpus_bleu(const std::vector<std::string>& predictions,
                   const std::vector<std::string>& targets, const BleuConfig& config = {},
                   Execution exec = Execution::Parallel);

/// Distinct over total normalized tokens; 0 for a line with no tokens.
double type_token_ratio(std::string_view line);

struct MetricCounters {
  std::size_t empty_lines = 0;
  std::size_t unphonemizable_end_words = 0;
};

double lexical_diversity_rmse(const std::vector<std::string>& predictions,
                              const std::vector<std::string>& targets,
                              MetricCounters* counters = nullptr,
                              Execution exec = Execution::Parallel);

/// Fraction of predictions whose end word is a Near or Perfect rhyme of at
/// least one of the paired input end words.
double rhyme_score(const std::vector<std::string>& predictions,
                   const std::vector<std::vector<std::string>>& input_end_words,
                   const RhymeClassifier& classifier, MetricCounters* counters = nullptr,
                   Execution exec = Execution::Parallel);

double syllable_rmse(const std::vector<std::string>& predictions,
                     const std::vector<std::string>& targets, const Phonemizer& phonemizer,
                     Execution exec = Execution::Parallel);

double end_word_accuracy(const std::vector<std::string>& predictions,
                         const std::vector<std::string>& targets,
                         Execution exec = Execution::Parallel);

/// End words the rhyme score compares against: list words for rhyme-list
/// inputs, otherwise the final word of each input line.
std::vector<std::string> input_end_words(const TrainingExample& parsed_input);

struct EvaluationReport {
  double bleu = 0;
  double lexical_diversity_rmse = 0;
  double rhyme_score = 0;
  double syllable_rmse = 0;
  double end_word_accuracy = 0;
  std::size_t n_examples = 0;
  std::size_t empty_predictions = 0;
  std::size_t unphonemizable_end_words = 0;
  std::string backend_id;
  std::string dataset_id;
  std::string config_hash;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

struct EvaluateOptions {
  std::uint64_t seed = 0;
  std::string dataset_id;
  BleuConfig bleu;
  Execution exec = Execution::Parallel;
  std::ostream* log = nullptr;  // progress and abort messages
};

/// One seeded prediction per row, scored with all five metrics. Throws
/// EmptyCorpus for no rows; BackendUnavailable aborts after logging how
/// many rows completed.
EvaluationReport evaluate(GenerationBackend& backend, const std::vector<TsvRow>& rows,
                          const RhymeClassifier& classifier, const EvaluateOptions& options = {});

/// Stable identifier for a TSV file's contents.
std::string dataset_id_of(const std::string& name, const std::vector<TsvRow>& rows);

}  // namespace linesmith
