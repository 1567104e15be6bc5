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

// Acceptance run: one PASS/FAIL line per primary criterion. Exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "cli_runner.hpp"
#include "linesmith/backend.hpp"
#include "linesmith/corpus.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/error.hpp"
#include "linesmith/generation.hpp"
#include "linesmith/metrics.hpp"
#include "linesmith/text.hpp"
#include "support.hpp"

using namespace linesmith;
using namespace linesmith::testing;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string detail;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const Corpus& filtered_corpus() {
  static const Corpus c = preprocess(synthetic_corpus(), FilterRules{}, StopwordList::builtin());
  return c;
}

void rhyme_golden_pairs(Check& c) {
  const auto start = Clock::now();
  const auto classifier = load_classifier(ResourceConfig{});
  c.expect(classifier->classify("doing", "ruin") == RhymeClass::Near, "doing/ruin is not Near");
  c.expect(classifier->classify("mobile", "local") == RhymeClass::Near, "mobile/local is not Near");
  c.expect(classifier->classify("cat", "hat") == RhymeClass::Perfect, "cat/hat is not Perfect");
  c.expect(classifier->classify("cat", "dog") == RhymeClass::None, "cat/dog is not None");
  std::ifstream in(test_data("rhyme_golden.tsv"));
  std::string line;
  std::size_t pairs = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string a, b, cls;
    std::getline(row, a, '\t');
    std::getline(row, b, '\t');
    std::getline(row, cls, '\t');
    ++pairs;
    const auto got = std::string(to_string(classifier->classify(a, b)));
    c.expect(got == cls, a + "/" + b + ": expected " + cls + ", got " + got);
  }
  const double elapsed = seconds_since(start);
  c.expect(pairs >= 600, "oracle file has only " + std::to_string(pairs) + " pairs");
  c.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  c.detail = std::to_string(pairs) + " oracle pairs in " + std::to_string(elapsed).substr(0, 5) + " s";
}

void preprocessing_fidelity(Check& c) {
  std::ifstream in(test_data("preprocess_golden.json"));
  const auto golden = nlohmann::json::parse(in);
  std::vector<std::pair<std::string, std::vector<std::string>>> expected;
  for (const auto& r : golden["retained"]) {
    expected.emplace_back(r["song"].get<std::string>(), r["lines"].get<std::vector<std::string>>());
  }
  c.expect(synthetic_corpus().verse_count() == 50, "synthetic corpus is not 50 verses");
  for (const auto exec : {Execution::Serial, Execution::Parallel}) {
    const Corpus out = preprocess(synthetic_corpus(), FilterRules{}, StopwordList::builtin(), nullptr, exec);
    std::vector<std::pair<std::string, std::vector<std::string>>> got;
    for (const auto& s : out.songs)
      for (const auto& v : s.verses) got.emplace_back(s.id, v.lines);
    c.expect(got == expected, "retained verses differ from the brute-force reference");
  }
  SplitConfig cfg;
  cfg.seed = 2021;
  cfg.test_fraction = 0.2;
  const auto split = split_by_song(filtered_corpus(), cfg);
  std::set<std::string> train;
  for (const auto& s : split.train.songs) train.insert(s.id);
  for (const auto& s : split.test.songs) c.expect(!train.count(s.id), "song " + s.id + " on both sides");
  c.expect(split.train.songs.size() + split.test.songs.size() == filtered_corpus().songs.size(),
           "split lost songs");
  c.detail = std::to_string(expected.size()) + " retained verses match; split by song";
}

void gestalt_oracle(Check& c) {
  c.expect(gestalt_similarity("hello", "hello world") == 0.625, "ratio(hello, hello world) != 0.625");
  Rng rng(2021);
  const std::string alphabet = "abcdeé fghij";
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto len = rng.uniform(40);
    for (std::uint64_t k = 0; k < len; ++k) s += alphabet[rng.uniform(alphabet.size())];
    c.expect(gestalt_similarity(s, s) == 1.0, "ratio(x, x) != 1 for \"" + s + "\"");
  }
  c.detail = "0.625 exact; ratio(x,x)=1 on 1000 random strings";
}

void dataset_validator(Check& c) {
  const auto dictionary = RhymeDictionary::build(shared_classifier(), filtered_corpus().all_lines());
  MixtureOptions opts;
  opts.seed = 2021;
  opts.include_rhyme_list = true;
  opts.rhyme_list_size = 500;
  const auto mixture = build_combined(filtered_corpus(), dictionary, opts);
  const auto* rhyme = mixture.find(Task::Rhyme);
  const auto* ending = mixture.find(Task::Ending);
  const auto* list = mixture.find(Task::RhymeList);
  c.expect(rhyme && ending && list, "mixture lacks a task");
  if (!rhyme || !ending || !list) return;
  c.expect(rhyme->examples.size() == ending->examples.size(), "|Ending| != |Rhyme|");
  c.expect(!rhyme->examples.empty(), "empty rhyme task");
  std::size_t total = 0;
  for (const auto& t : mixture.tasks) {
    const auto issues = validate_examples(t.examples, *shared_classifier());
    for (const auto& issue : issues) c.expect(false, std::string(task_name(t.task)) + " #" + std::to_string(issue.index) + ": " + issue.message);
    for (const auto& ex : t.examples) {
      // The rendered input carries neither the target nor the song id.
      auto back = parse_input(render_input(ex));
      back.target = ex.target;
      back.song_id = ex.song_id;
      c.expect(back == ex, "round trip changed: " + render_input(ex));
      c.expect(!ex.input_lines.empty() || t.task == Task::RhymeList, "empty window");
      c.expect(ex.input_lines.size() <= 4, "window above 4 lines");
      if (t.task == Task::RhymeList) c.expect(ex.rhyme_list_words.size() == 5, "rhyme list without 5 words");
      if (t.task == Task::Ending) c.expect(ex.ending_word_tag == final_word(ex.target), "ending tag mismatch");
      ++total;
    }
  }
  c.detail = std::to_string(total) + " examples valid; |Rhyme| = |Ending| = " + std::to_string(rhyme->examples.size());
}

void tag_grammar(Check& c) {
  std::ifstream in(test_data("tag_grammar_golden.json"));
  const auto golden = nlohmann::json::parse(in);
  std::set<std::string> seen;
  const std::vector<std::string> tags = {"finish lines:", "finish lines rhyme:", "finish lines ending:", "[LINE]",
                                         "[RHYME]",       "syllable count:",     "ending word:"};
  for (const auto& g : golden) {
    TrainingExample ex;
    ex.task = *parse_task_name(g["task"].get<std::string>());
    if (g.contains("lines")) ex.input_lines = g["lines"].get<std::vector<std::string>>();
    if (g.contains("flags")) ex.rhyme_flags = g["flags"].get<std::vector<bool>>();
    if (g.contains("syllables")) ex.syllable_tag = g["syllables"].get<int>();
    if (g.contains("ending")) ex.ending_word_tag = g["ending"].get<std::string>();
    if (g.contains("words")) ex.rhyme_list_words = g["words"].get<std::vector<std::string>>();
    const auto expected = g["rendered"].get<std::string>();
    c.expect(render_input(ex) == expected, "rendered \"" + render_input(ex) + "\"");
    c.expect(parse_input(expected) == ex, "parse of \"" + expected + "\"");
    for (const auto& t : tags)
      if (expected.find(t) != std::string::npos) seen.insert(t);
  }
  c.expect(seen.size() == tags.size(), "golden files do not cover every tag");
  c.detail = std::to_string(golden.size()) + " golden strings byte-exact";
}

class RhymeSwapBackend final : public GenerationBackend {
 public:
  explicit RhymeSwapBackend(std::map<std::string, std::string> table) : table_(std::move(table)) {}
  std::vector<std::string> generate(const std::string& input, std::size_t, Rng&) override { return {table_.at(input)}; }
  std::string id() const override { return "rhyme-swap"; }

 private:
  std::map<std::string, std::string> table_;
};

void metric_forced_values(Check& c) {
  const auto dictionary = RhymeDictionary::build(shared_classifier(), filtered_corpus().all_lines());
  MixtureOptions opts;
  opts.seed = 2021;
  std::vector<TsvRow> rows;
  for (const auto& t : build_combined(filtered_corpus(), dictionary, opts).tasks)
    for (const auto& ex : t.examples) rows.push_back(to_row(ex));

  EchoBackend echo(rows);
  const auto report = evaluate(echo, rows, *shared_classifier());
  c.expect(report.bleu == 100.0, "echo BLEU " + std::to_string(report.bleu));
  c.expect(report.lexical_diversity_rmse == 0.0, "echo lexical RMSE " + std::to_string(report.lexical_diversity_rmse));
  c.expect(report.syllable_rmse == 0.0, "echo syllable RMSE " + std::to_string(report.syllable_rmse));
  c.expect(report.end_word_accuracy == 1.0, "echo end-word accuracy " + std::to_string(report.end_word_accuracy));

  std::vector<TsvRow> swap_rows;
  std::map<std::string, std::string> swaps;
  for (const auto& row : rows) {
    const auto target_end = final_word(row.target);
    for (const auto& w : input_end_words(parse_input(row.input))) {
      std::string pick;
      for (const auto& r : dictionary.rhymes_of(w))
        if (r.word != target_end && r.word != w) pick = r.word;
      if (pick.empty()) continue;
      auto tokens = split_whitespace(row.target);
      tokens.back() = pick;
      std::string line;
      for (const auto& t : tokens) line += (line.empty() ? "" : " ") + t;
      if (swaps.emplace(row.input, line).second) swap_rows.push_back(row);
      break;
    }
  }
  c.expect(swap_rows.size() > 10, "too few rows admit a rhyme swap");
  RhymeSwapBackend swap(swaps);
  const auto swapped = evaluate(swap, swap_rows, *shared_classifier());
  c.expect(swapped.rhyme_score == 1.0, "swap rhyme score " + std::to_string(swapped.rhyme_score));
  c.expect(swapped.end_word_accuracy == 0.0, "swap end-word accuracy " + std::to_string(swapped.end_word_accuracy));

  std::ifstream in(test_data("bleu_golden.json"));
  const auto golden = nlohmann::json::parse(in);
  const double oracle = golden.at(0)["bleu"].get<double>();
  const double bleu = corpus_bleu({"the cat sat on the mat"}, {"the cat sat on a mat"});
  c.expect(std::abs(bleu - oracle) < 1e-6, "fixed pair BLEU " + std::to_string(bleu));
  std::ostringstream d;
  d.precision(10);
  d << "echo over " << rows.size() << " rows forced; swap over " << swap_rows.size() << " rows; fixed pair "
    << bleu;
  c.detail = d.str();
}

// Counts backend calls per rendered query.
class CountingBackend final : public GenerationBackend {
 public:
  explicit CountingBackend(GenerationBackend& inner) : inner_(inner) {}
  std::vector<std::string> generate(const std::string& input, std::size_t k, Rng& rng) override {
    ++calls;
    return inner_.generate(input, k, rng);
  }
  std::string id() const override { return inner_.id(); }
  std::size_t calls = 0;

 private:
  GenerationBackend& inner_;
};

void constrained_decoding(Check& c) {
  auto model = std::make_shared<const NgramModel>(NgramModel::train(filtered_corpus().all_lines()));
  auto dictionary = std::make_shared<const RhymeDictionary>(
      RhymeDictionary::build(shared_classifier(), filtered_corpus().all_lines()));
  NgramBackend backend(model, dictionary);
  Suggester suggester(dictionary);

  std::vector<std::vector<std::string>> windows;
  for (const auto& song : filtered_corpus().songs)
    for (const auto& verse : song.verses)
      windows.push_back({verse.lines.begin(), verse.lines.begin() + std::min<std::size_t>(2, verse.lines.size())});
  const std::vector<std::string> endings = {"home", "night", "love", "tonight", "forever", "zebra"};

  std::size_t candidates = 0, matched = 0, max_attempts = 0, max_queries = 0, force_requests = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    SuggestionRequest r;
    r.input_lines = windows[i];
    r.ending_word = endings[i % endings.size()];
    r.syllable_target = 5 + static_cast<int>(i % 6);
    Rng rng(mix_seed(2021, "accept-ending", i));
    for (const auto& cand : suggester.suggest(r, backend, rng).candidates) {
      ++candidates;
      if (cand.report.end_word_match && final_word(cand.line) == *r.ending_word) ++matched;
      max_attempts = std::max(max_attempts, cand.attempts);
    }

    SuggestionRequest f;
    f.input_lines = windows[i];
    f.force_rhyme = true;
    f.k = 2;
    CountingBackend counting(backend);
    Rng frng(mix_seed(2021, "accept-force", i));
    try {
      const auto set = suggester.suggest(f, counting, frng);
      max_queries = std::max({max_queries, set.queries.size(), counting.calls});
      ++force_requests;
    } catch (const UnknownWord&) {
    }
  }
  c.expect(candidates > 0, "no candidates");
  c.expect(matched == candidates, std::to_string(candidates - matched) + " of " + std::to_string(candidates) +
                                      " candidates miss the ending word");
  c.expect(max_attempts <= 5, "a candidate used " + std::to_string(max_attempts) + " attempts");
  c.expect(max_queries <= 8, "force-rhyme issued " + std::to_string(max_queries) + " queries");
  c.expect(force_requests > 0, "no force-rhyme request ran");
  c.detail = std::to_string(matched) + "/" + std::to_string(candidates) + " end-word matches; max attempts " +
             std::to_string(max_attempts) + "; max force-rhyme queries " + std::to_string(max_queries);
}

void determinism(Check& c) {
  TempDir dir;
  const auto corpus = data_file("synthetic_corpus.jsonl").string();
  std::vector<std::string> dumps;
  for (const char* name : {"a", "b"}) {
    const auto out = dir.path() / name;
    const auto r = run_cli({"--seed", "2021", "build-dataset", "--corpus", corpus, "--out", out.string(), "--kind",
                            "combined-list"}, dir.path());
    c.expect(r.exit_code == 0, "build-dataset exit " + std::to_string(r.exit_code) + ": " + r.err);
    std::string all;
    for (const auto& f : {"train_rhyme.tsv", "train_ending.tsv", "train_rhyme_list.tsv", "test_rhyme.tsv",
                          "test_ending.tsv", "manifest.tsv"}) {
      all += std::string(f) + "\n" + slurp(out / f);
    }
    dumps.push_back(all);
  }
  c.expect(dumps[0] == dumps[1], "build-dataset outputs differ");

  const auto data = (dir.path() / "a" / "test_rhyme.tsv").string();
  std::vector<std::string> reports;
  for (const char* name : {"r1.json", "r2.json"}) {
    const auto out = (dir.path() / name).string();
    const auto r = run_cli({"--seed", "2021", "evaluate", "--corpus", corpus, "--data", data, "--out", out}, dir.path());
    c.expect(r.exit_code == 0, "evaluate exit " + std::to_string(r.exit_code) + ": " + r.err);
    reports.push_back(slurp(out));
  }
  c.expect(reports[0] == reports[1], "evaluate reports differ");
  c.expect(!reports[0].empty(), "empty evaluate report");
  c.detail = "build-dataset and evaluate byte-identical across two runs";
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
    Check check;
  };
  std::vector<Criterion> criteria = {
      {"rhyme golden pairs", rhyme_golden_pairs, {}},
      {"preprocessing fidelity", preprocessing_fidelity, {}},
      {"gestalt ratio oracle", gestalt_oracle, {}},
      {"dataset validator", dataset_validator, {}},
      {"tag grammar", tag_grammar, {}},
      {"metric forced values", metric_forced_values, {}},
      {"constrained decoding", constrained_decoding, {}},
      {"determinism", determinism, {}},
  };
  for (auto& cr : criteria) {
    try {
      cr.run(cr.check);
    } catch (const std::exception& e) {
      cr.check.expect(false, std::string("exception: ") + e.what());
    }
  }
  const double total = seconds_since(suite_start);
  for (auto& cr : criteria) {
    if (std::string(cr.name) == "constrained decoding") {
      cr.check.expect(total < 120.0, "suite took " + std::to_string(total) + " s");
      cr.check.detail += "; suite " + std::to_string(total).substr(0, 5) + " s";
    }
  }

  int failed = 0;
  for (const auto& cr : criteria) {
    if (cr.check.failures.empty()) {
      std::cout << "PASS  " << cr.name << "  (" << cr.check.detail << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL  " << cr.name;
      for (const auto& f : cr.check.failures) std::cout << "\n        " << f;
      std::cout << "\n";
    }
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failed == 0 ? 0 : 1;
}
