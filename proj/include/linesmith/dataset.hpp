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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linesmith/corpus.hpp"
#include "linesmith/execution.hpp"
#include "linesmith/phonetics.hpp"
#include "linesmith/rhyme.hpp"
#include "linesmith/rng.hpp"

namespace linesmith {

enum class Task { Control, Rhyme, Ending, RhymeList };

std::string_view task_name(Task task);
std::string_view task_prefix(Task task);
std::optional<Task> parse_task_name(std::string_view name);

namespace tags {
inline constexpr std::string_view kLine = "[LINE]";
inline constexpr std::string_view kRhyme = "[RHYME]";
inline constexpr std::string_view kSyllableCount = "syllable count:";
inline constexpr std::string_view kEndingWord = "ending word:";
}  // namespace tags

/// Reference hyperparameters of the neural model a remote backend is
/// expected to serve. Not consumed by anything in this library.
struct ExternalModelProfile {
  static constexpr double kParameterCount = 220e6;
  static constexpr int kFinetuneSteps = 12000;
  static constexpr double kLearningRate = 0.003;
  static constexpr int kBatchSize = 128;
  static constexpr int kMaxSequenceLength = 128;
};

inline constexpr std::size_t kMaxInputLines = 4;
inline constexpr std::size_t kRhymeListWords = 5;
inline constexpr std::size_t kDefaultRhymeListSize = 20000;

struct TrainingExample {
  Task task = Task::Control;
  std::vector<std::string> input_lines;
  std::vector<bool> rhyme_flags;  // parallel to input_lines
  std::optional<int> syllable_tag;
  std::optional<std::string> ending_word_tag;
  std::vector<std::string> rhyme_list_words;
  std::string target;
  std::string song_id;

  bool operator==(const TrainingExample&) const = default;
};

/// One Control example per target line 2..L; each takes the r lines right
/// before its target, r uniform in [1, min(4, i-1)].
std::vector<TrainingExample> make_finish_lines_examples(const Verse& verse,
                                                        std::string_view song_id, Rng& rng);

/// Flags every input line whose end word rhymes with the target's end word.
/// Nothing when no line does.
std::optional<TrainingExample> annotate_rhyme(const TrainingExample& example,
                                              const RhymeClassifier& classifier);

TrainingExample append_syllable_tag(TrainingExample example, const Phonemizer& phonemizer);

/// Sets the ending-word tag and retags the example as Ending. Rhyme-task
/// examples are returned unchanged.
TrainingExample append_ending_word_tag(TrainingExample example);

/// `n` examples of 5 input words plus a target, all 6 drawn without
/// replacement from one bucket. Throws InsufficientRhymes when no bucket
/// holds 6 words (and n > 0).
std::vector<TrainingExample> make_rhyme_list_examples(const RhymeDictionary& dictionary,
                                                      std::size_t n, Rng& rng);

/// Control examples for every verse of a corpus. Each verse draws from its
/// own seeded stream, so the parallel path is byte-identical to the serial
/// one.
std::vector<TrainingExample> make_corpus_examples(const Corpus& corpus, std::uint64_t seed,
                                                  Execution exec = Execution::Serial);

struct TaskDataset {
  Task task = Task::Control;
  std::vector<TrainingExample> examples;
  double weight = 1.0;
};

struct TaskMixture {
  std::vector<TaskDataset> tasks;
  const TaskDataset* find(Task task) const;
  std::size_t total_examples() const;
};

enum class DatasetKind { Control, Rhyme, Ending, Combined, CombinedList };

std::string_view dataset_kind_name(DatasetKind kind);
std::optional<DatasetKind> parse_dataset_kind(std::string_view name);

struct MixtureOptions {
  std::uint64_t seed = 0;
  bool include_rhyme_list = false;
  std::size_t rhyme_list_size = kDefaultRhymeListSize;
  // Syllable tags on single-task Control / Rhyme / Ending sets.
  bool single_task_syllable_tag = false;
  Execution exec = Execution::Serial;
};

/// Rhyme set (annotated survivors + syllable tags) and Ending set
/// (non-survivors + syllable and ending-word tags) cut to equal size by a
/// seeded subsample, plus the optional rhyme-list task. Equal weights.
TaskMixture build_combined(const Corpus& train, const RhymeDictionary& dictionary,
                           const MixtureOptions& opts);

/// Any of the five dataset kinds. The dictionary is only consulted for
/// rhyme-aware kinds.
TaskMixture build_dataset(DatasetKind kind, const Corpus& corpus,
                          const RhymeDictionary& dictionary, const MixtureOptions& opts);

/// Canonical model input:
///   <prefix> <line1> [LINE] <line2> ... [syllable count: n] [ending word: w]
/// with `[RHYME] ` before the final word of every flagged line. Rhyme-list
/// examples render as `rhyme list: w1 [RHYME] w2 ... [RHYME] w5`.
std::string render_input(const TrainingExample& example);

/// Inverse of render_input (target and song id stay empty). Throws
/// ParseError on text that does not follow the grammar.
TrainingExample parse_input(std::string_view rendered);

struct TsvRow {
  std::string input;
  std::string target;
  bool operator==(const TsvRow&) const = default;
};

TsvRow to_row(const TrainingExample& example);
void write_tsv(const std::vector<TrainingExample>& examples, std::ostream& out);
void write_tsv(const std::vector<TrainingExample>& examples, const std::filesystem::path& path);
std::vector<TsvRow> read_tsv(std::istream& in);
std::vector<TsvRow> read_tsv(const std::filesystem::path& path);

struct ValidationIssue {
  std::size_t index = 0;
  std::string message;
};

/// Checks every TrainingExample invariant, the render/parse round trip,
/// and syllable-tag correctness.
std::vector<ValidationIssue> validate_examples(const std::vector<TrainingExample>& examples,
                                               const RhymeClassifier& classifier);

struct ManifestEntry {
  std::string split;
  Task task = Task::Control;
  std::string path;
  std::size_t count = 0;
  double weight = 0.0;
};

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace linesmith
