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

#include "linesmith/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

constexpr std::string_view kRhymeMarker = "[RHYME] ";
constexpr std::string_view kLineSeparator = " [LINE] ";
constexpr std::string_view kListSeparator = " [RHYME] ";
constexpr std::string_view kSyllableSuffix = " syllable count: ";
constexpr std::string_view kEndingSuffix = " ending word: ";

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::vector<std::string> split_on(std::string_view text, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + sep.size();
  }
}

// Inserts the rhyme marker before the last token that carries a word.
std::string mark_line(const std::string& line) {
  const auto tokens = split_whitespace(line);
  std::size_t target = tokens.size();
  for (std::size_t i = tokens.size(); i-- > 0;) {
    if (!normalize_token(tokens[i]).empty()) {
      target = i;
      break;
    }
  }
  if (target == tokens.size()) target = tokens.empty() ? 0 : tokens.size() - 1;
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    if (i == target) out += kRhymeMarker;
    out += tokens[i];
  }
  return out;
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", w);
  return buf;
}

TaskDataset make_task(Task task, std::vector<TrainingExample> examples) {
  TaskDataset ds;
  ds.task = task;
  ds.examples = std::move(examples);
  return ds;
}

void equalize_weights(TaskMixture& mixture) {
  for (auto& t : mixture.tasks) t.weight = 1.0 / static_cast<double>(mixture.tasks.size());
}

template <typename T>
std::vector<T> subsample_in_order(std::vector<T> items, std::size_t k, Rng& rng) {
  if (items.size() <= k) return items;
  auto idx = rng.sample_indices(items.size(), k);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(k);
  for (auto i : idx) out.push_back(std::move(items[i]));
  return out;
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::Control: return "control";
    case Task::Rhyme: return "rhyme";
    case Task::Ending: return "ending";
    case Task::RhymeList: return "rhyme_list";
  }
  return "control";
}

std::string_view task_prefix(Task task) {
  switch (task) {
    case Task::Control: return "finish lines:";
    case Task::Rhyme: return "finish lines rhyme:";
    case Task::Ending: return "finish lines ending:";
    case Task::RhymeList: return "rhyme list:";
  }
  return "finish lines:";
}

std::optional<Task> parse_task_name(std::string_view name) {
  for (Task t : {Task::Control, Task::Rhyme, Task::Ending, Task::RhymeList}) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Control: return "control";
    case DatasetKind::Rhyme: return "rhyme";
    case DatasetKind::Ending: return "ending";
    case DatasetKind::Combined: return "combined";
    case DatasetKind::CombinedList: return "combined-list";
  }
  return "control";
}

std::optional<DatasetKind> parse_dataset_kind(std::string_view name) {
  for (DatasetKind k : {DatasetKind::Control, DatasetKind::Rhyme, DatasetKind::Ending,
                        DatasetKind::Combined, DatasetKind::CombinedList}) {
    if (dataset_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<TrainingExample> make_finish_lines_examples(const Verse& verse,
                                                        std::string_view song_id, Rng& rng) {
  std::vector<TrainingExample> out;
  const auto& lines = verse.lines;
  for (std::size_t t = 1; t < lines.size(); ++t) {
    const std::size_t max_inputs = std::min(kMaxInputLines, t);
    const std::size_t r = rng.uniform_between(1, max_inputs);
    TrainingExample ex;
    ex.task = Task::Control;
    ex.input_lines.assign(lines.begin() + static_cast<std::ptrdiff_t>(t - r),
                          lines.begin() + static_cast<std::ptrdiff_t>(t));
    ex.rhyme_flags.assign(r, false);
    ex.target = lines[t];
    ex.song_id = std::string(song_id);
    out.push_back(std::move(ex));
  }
  return out;
}

std::optional<TrainingExample> annotate_rhyme(const TrainingExample& example,
                                              const RhymeClassifier& classifier) {
  const std::string target_word = final_word(example.target);
  if (target_word.empty()) return std::nullopt;
  const auto target_key = classifier.try_key_of(target_word);
  if (!target_key) return std::nullopt;

  TrainingExample out = example;
  out.task = Task::Rhyme;
  out.ending_word_tag.reset();
  out.rhyme_flags.assign(out.input_lines.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < out.input_lines.size(); ++i) {
    const std::string w = final_word(out.input_lines[i]);
    if (w.empty()) continue;
    const auto key = classifier.try_key_of(w);
    if (key && classifier.classify_keys(*key, *target_key) != RhymeClass::None) {
      out.rhyme_flags[i] = true;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return out;
}

TrainingExample append_syllable_tag(TrainingExample example, const Phonemizer& phonemizer) {
  example.syllable_tag = static_cast<int>(phonemizer.line_syllables(example.target));
  return example;
}

TrainingExample append_ending_word_tag(TrainingExample example) {
  if (example.task == Task::Rhyme || example.task == Task::RhymeList) return example;
  example.task = Task::Ending;
  example.ending_word_tag = final_word(example.target);
  return example;
}

std::vector<TrainingExample> make_rhyme_list_examples(const RhymeDictionary& dictionary,
                                                      std::size_t n, Rng& rng) {
  std::vector<TrainingExample> out;
  if (n == 0) return out;
  std::vector<std::vector<std::string>> eligible;
  for (const auto& [key, words] : dictionary.buckets()) {
    if (words.size() < kRhymeListWords + 1) continue;
    std::vector<std::string> list;
    for (const auto& [w, _] : words) list.push_back(w);
    eligible.push_back(std::move(list));
  }
  if (eligible.empty()) {
    throw InsufficientRhymes("no rhyme bucket holds " + std::to_string(kRhymeListWords + 1) +
                             " words");
  }
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bucket = eligible[rng.uniform(eligible.size())];
    const auto picks = rng.sample_indices(bucket.size(), kRhymeListWords + 1);
    TrainingExample ex;
    ex.task = Task::RhymeList;
    for (std::size_t p = 0; p < kRhymeListWords; ++p) ex.rhyme_list_words.push_back(bucket[picks[p]]);
    ex.target = bucket[picks[kRhymeListWords]];
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TrainingExample> make_corpus_examples(const Corpus& corpus, std::uint64_t seed,
                                                  Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.songs.size());
  std::vector<std::vector<TrainingExample>> per_song(corpus.songs.size());
  const auto run = [&](std::ptrdiff_t i) {
    const Song& song = corpus.songs[i];
    for (std::size_t v = 0; v < song.verses.size(); ++v) {
      Rng rng(mix_seed(seed, song.id, v));
      auto ex = make_finish_lines_examples(song.verses[v], song.id, rng);
      per_song[i].insert(per_song[i].end(), std::make_move_iterator(ex.begin()),
                         std::make_move_iterator(ex.end()));
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  }
  std::vector<TrainingExample> out;
  for (auto& s : per_song) {
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

const TaskDataset* TaskMixture::find(Task task) const {
  for (const auto& t : tasks) {
    if (t.task == task) return &t;
  }
  return nullptr;
}

std::size_t TaskMixture::total_examples() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.examples.size();
  return n;
}

namespace {

struct RhymeSplit {
  std::vector<TrainingExample> rhyme;
  std::vector<TrainingExample> no_rhyme;
};

// Annotates every example; survivors go to the rhyme side, the rest (with a
// usable final word) to the other.
RhymeSplit split_rhyme(const std::vector<TrainingExample>& controls,
                       const RhymeClassifier& classifier, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(controls.size());
  std::vector<std::optional<TrainingExample>> annotated(controls.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t i = 0; i < n; ++i) annotated[i] = annotate_rhyme(controls[i], classifier);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) annotated[i] = annotate_rhyme(controls[i], classifier);
  }
  RhymeSplit out;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (annotated[i]) {
      out.rhyme.push_back(*std::move(annotated[i]));
    } else if (!final_word(controls[i].target).empty()) {
      out.no_rhyme.push_back(controls[i]);
    }
  }
  return out;
}

}  // namespace

TaskMixture build_combined(const Corpus& train, const RhymeDictionary& dictionary,
                           const MixtureOptions& opts) {
  const RhymeClassifier& classifier = dictionary.classifier();
  const Phonemizer& phonemizer = classifier.phonemizer();
  auto controls = make_corpus_examples(train, opts.seed, opts.exec);
  auto split = split_rhyme(controls, classifier, opts.exec);

  std::vector<TrainingExample> rhyme;
  rhyme.reserve(split.rhyme.size());
  for (auto& ex : split.rhyme) rhyme.push_back(append_syllable_tag(std::move(ex), phonemizer));

  Rng balance(mix_seed(opts.seed, "balance"));
  // The ending set is cut down to the rhyme set; in the rare corpus where
  // rhymes outnumber the rest, the rhyme set is cut instead.
  auto no_rhyme = subsample_in_order(std::move(split.no_rhyme), rhyme.size(), balance);
  rhyme = subsample_in_order(std::move(rhyme), no_rhyme.size(), balance);

  std::vector<TrainingExample> ending;
  ending.reserve(no_rhyme.size());
  for (auto& ex : no_rhyme) {
    ending.push_back(append_ending_word_tag(append_syllable_tag(std::move(ex), phonemizer)));
  }

  TaskMixture mixture;
  mixture.tasks.push_back(make_task(Task::Rhyme, std::move(rhyme)));
  mixture.tasks.push_back(make_task(Task::Ending, std::move(ending)));
  if (opts.include_rhyme_list) {
    Rng list_rng(mix_seed(opts.seed, "rhyme-list"));
    mixture.tasks.push_back(make_task(
        Task::RhymeList, make_rhyme_list_examples(dictionary, opts.rhyme_list_size, list_rng)));
  }
  equalize_weights(mixture);
  return mixture;
}

TaskMixture build_dataset(DatasetKind kind, const Corpus& corpus,
                          const RhymeDictionary& dictionary, const MixtureOptions& opts) {
  if (kind == DatasetKind::Combined || kind == DatasetKind::CombinedList) {
    MixtureOptions o = opts;
    o.include_rhyme_list = kind == DatasetKind::CombinedList;
    return build_combined(corpus, dictionary, o);
  }
  const RhymeClassifier& classifier = dictionary.classifier();
  const Phonemizer& phonemizer = classifier.phonemizer();
  auto controls = make_corpus_examples(corpus, opts.seed, opts.exec);
  std::vector<TrainingExample> examples;
  Task task = Task::Control;
  switch (kind) {
    case DatasetKind::Control:
      examples = std::move(controls);
      break;
    case DatasetKind::Rhyme:
      task = Task::Rhyme;
      examples = split_rhyme(controls, classifier, opts.exec).rhyme;
      break;
    case DatasetKind::Ending:
      task = Task::Ending;
      for (auto& ex : controls) {
        if (!final_word(ex.target).empty()) examples.push_back(append_ending_word_tag(std::move(ex)));
      }
      break;
    default:
      break;
  }
  if (opts.single_task_syllable_tag) {
    for (auto& ex : examples) ex = append_syllable_tag(std::move(ex), phonemizer);
  }
  TaskMixture mixture;
  mixture.tasks.push_back(make_task(task, std::move(examples)));
  equalize_weights(mixture);
  return mixture;
}

std::string render_input(const TrainingExample& example) {
  std::string out(task_prefix(example.task));
  if (example.task == Task::RhymeList) {
    for (std::size_t i = 0; i < example.rhyme_list_words.size(); ++i) {
      out += i == 0 ? " " : kListSeparator;
      out += example.rhyme_list_words[i];
    }
    return out;
  }
  for (std::size_t i = 0; i < example.input_lines.size(); ++i) {
    out += i == 0 ? " " : kLineSeparator;
    const bool flagged = i < example.rhyme_flags.size() && example.rhyme_flags[i];
    out += flagged ? mark_line(example.input_lines[i]) : example.input_lines[i];
  }
  if (example.syllable_tag) {
    out += kSyllableSuffix;
    out += std::to_string(*example.syllable_tag);
  }
  if (example.ending_word_tag) {
    out += kEndingSuffix;
    out += *example.ending_word_tag;
  }
  return out;
}

TrainingExample parse_input(std::string_view rendered) {
  TrainingExample ex;
  std::string_view rest;
  bool matched = false;
  // Longer prefixes first: "finish lines:" is not a prefix of the others,
  // but check the specific ones anyway.
  for (Task t : {Task::Rhyme, Task::Ending, Task::Control, Task::RhymeList}) {
    const auto prefix = task_prefix(t);
    if (starts_with(rendered, prefix) &&
        (rendered.size() == prefix.size() || rendered[prefix.size()] == ' ')) {
      ex.task = t;
      rest = rendered.substr(std::min(rendered.size(), prefix.size() + 1));
      matched = true;
      break;
    }
  }
  if (!matched) throw ParseError("unknown task prefix in '" + std::string(rendered) + "'");

  if (ex.task == Task::RhymeList) {
    ex.rhyme_list_words = split_on(rest, kListSeparator);
    for (const auto& w : ex.rhyme_list_words) {
      if (w.empty() || w.find(' ') != std::string::npos) {
        throw ParseError("malformed rhyme list '" + std::string(rendered) + "'");
      }
    }
    return ex;
  }

  if (const auto pos = rest.rfind(kEndingSuffix);
      ex.task == Task::Ending && pos != std::string_view::npos) {
    const auto word = rest.substr(pos + kEndingSuffix.size());
    if (!word.empty() && word.find(' ') == std::string_view::npos) {
      ex.ending_word_tag = std::string(word);
      rest = rest.substr(0, pos);
    }
  }
  if (const auto pos = rest.rfind(kSyllableSuffix); pos != std::string_view::npos) {
    const auto digits = rest.substr(pos + kSyllableSuffix.size());
    if (!digits.empty() && digits.size() <= 6 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      ex.syllable_tag = std::stoi(std::string(digits));
      rest = rest.substr(0, pos);
    }
  }
  if (rest.empty()) throw ParseError("no input lines in '" + std::string(rendered) + "'");

  for (auto& line : split_on(rest, kLineSeparator)) {
    bool flagged = false;
    if (starts_with(line, kRhymeMarker)) {
      line.erase(0, kRhymeMarker.size());
      flagged = true;
    } else if (const auto pos = line.find(std::string(" ") + std::string(kRhymeMarker));
               pos != std::string::npos) {
      line.erase(pos + 1, kRhymeMarker.size());
      flagged = true;
    }
    if (line.empty()) throw ParseError("empty input line in '" + std::string(rendered) + "'");
    ex.input_lines.push_back(std::move(line));
    ex.rhyme_flags.push_back(flagged);
  }
  if (ex.input_lines.size() > kMaxInputLines) {
    throw ParseError("more than " + std::to_string(kMaxInputLines) + " input lines in '" +
                     std::string(rendered) + "'");
  }
  if (ex.task == Task::Ending && !ex.ending_word_tag) {
    throw ParseError("ending task without an ending word in '" + std::string(rendered) + "'");
  }
  return ex;
}

TsvRow to_row(const TrainingExample& example) { return {render_input(example), example.target}; }

void write_tsv(const std::vector<TrainingExample>& examples, std::ostream& out) {
  std::size_t row = 0;
  for (const auto& ex : examples) {
    ++row;
    const TsvRow r = to_row(ex);
    for (const auto* cell : {&r.input, &r.target}) {
      if (cell->find_first_of("\t\r\n") != std::string::npos) {
        throw MalformedRow("cell contains a tab or newline", row);
      }
    }
    out << r.input << '\t' << r.target << '\n';
  }
}

void write_tsv(const std::vector<TrainingExample>& examples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset: " + path.string());
  write_tsv(examples, out);
}

std::vector<TsvRow> read_tsv(std::istream& in) {
  std::vector<TsvRow> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_on(line, "\t");
    if (cells.size() != 2) {
      throw MalformedRow("expected 2 tab-separated cells, found " + std::to_string(cells.size()),
                         row);
    }
    if (cells[0].empty()) throw MalformedRow("empty input cell", row);
    rows.push_back({cells[0], cells[1]});
  }
  return rows;
}

std::vector<TsvRow> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  return read_tsv(in);
}

std::vector<ValidationIssue> validate_examples(const std::vector<TrainingExample>& examples,
                                               const RhymeClassifier& classifier) {
  const Phonemizer& phonemizer = classifier.phonemizer();
  std::vector<ValidationIssue> issues;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const auto fail = [&](std::string msg) { issues.push_back({i, std::move(msg)}); };
    const std::string target_word = final_word(ex.target);
    if (ex.target.empty()) fail("empty target");

    if (ex.task == Task::RhymeList) {
      if (!ex.input_lines.empty()) fail("rhyme-list example has input lines");
      if (ex.rhyme_list_words.size() != kRhymeListWords) fail("rhyme list must hold 5 words");
      std::vector<std::string> all = ex.rhyme_list_words;
      all.push_back(ex.target);
      std::sort(all.begin(), all.end());
      if (std::adjacent_find(all.begin(), all.end()) != all.end()) fail("repeated rhyme-list word");
      for (const auto& w : ex.rhyme_list_words) {
        if (classifier.classify_or_none(w, ex.target) == RhymeClass::None) {
          fail("'" + w + "' does not rhyme with '" + ex.target + "'");
        }
      }
    } else {
      if (ex.input_lines.empty() || ex.input_lines.size() > kMaxInputLines) {
        fail("input window must hold 1-4 lines");
      }
      if (ex.rhyme_flags.size() != ex.input_lines.size()) fail("rhyme flags misaligned");
      if (!ex.rhyme_list_words.empty()) fail("rhyme-list words on a line task");
      const bool any_flag = std::find(ex.rhyme_flags.begin(), ex.rhyme_flags.end(), true) !=
                            ex.rhyme_flags.end();
      switch (ex.task) {
        case Task::Rhyme:
          if (!any_flag) fail("rhyme example without [RHYME] flags");
          if (ex.ending_word_tag) fail("rhyme example carries an ending-word tag");
          for (std::size_t l = 0; l < ex.input_lines.size() && l < ex.rhyme_flags.size(); ++l) {
            if (!ex.rhyme_flags[l]) continue;
            const std::string w = final_word(ex.input_lines[l]);
            if (classifier.classify_or_none(w, target_word) == RhymeClass::None) {
              fail("flagged word '" + w + "' does not rhyme with '" + target_word + "'");
            }
          }
          break;
        case Task::Ending:
          if (any_flag) fail("ending example carries [RHYME] flags");
          if (!ex.ending_word_tag || ex.ending_word_tag->empty() ||
              *ex.ending_word_tag != target_word) {
            fail("ending-word tag does not match the target's final word");
          }
          break;
        default:
          if (any_flag) fail("control example carries [RHYME] flags");
          if (ex.ending_word_tag) fail("control example carries an ending-word tag");
          break;
      }
    }

    if (ex.syllable_tag &&
        static_cast<std::size_t>(*ex.syllable_tag) != phonemizer.line_syllables(ex.target)) {
      fail("syllable tag " + std::to_string(*ex.syllable_tag) + " != target syllables");
    }

    const std::string rendered = render_input(ex);
    if (rendered.find_first_of("\t\r\n") != std::string::npos ||
        ex.target.find_first_of("\t\r\n") != std::string::npos) {
      fail("tab or newline in a serialized cell");
    }
    try {
      TrainingExample back = parse_input(rendered);
      back.target = ex.target;
      back.song_id = ex.song_id;
      if (!(back == ex)) fail("render/parse round trip changed the example");
    } catch (const ParseError& e) {
      fail(std::string("rendered input does not parse: ") + e.what());
    }
  }
  return issues;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << "split\ttask\tpath\tcount\tweight\n";
  for (const auto& e : entries) {
    out << e.split << '\t' << task_name(e.task) << '\t' << e.path << '\t' << e.count << '\t'
        << format_weight(e.weight) << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 || line.empty()) continue;
    const auto cells = split_on(line, "\t");
    if (cells.size() != 5) throw MalformedRow("expected 5 manifest cells", row);
    const auto task = parse_task_name(cells[1]);
    if (!task) throw MalformedRow("unknown task '" + cells[1] + "'", row);
    try {
      out.push_back({cells[0], *task, cells[2], std::stoul(cells[3]), std::stod(cells[4])});
    } catch (const std::logic_error&) {
      throw MalformedRow("bad count or weight", row);
    }
  }
  return out;
}

}  // namespace linesmith
