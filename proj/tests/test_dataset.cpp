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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "linesmith/corpus.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/error.hpp"
#include "support.hpp"

using namespace linesmith;
using linesmith::testing::shared_classifier;
using linesmith::testing::synthetic_corpus;
using linesmith::testing::TempDir;
using linesmith::testing::test_data;

namespace {

const Corpus& filtered() {
  static const Corpus c = preprocess(synthetic_corpus(), FilterRules{}, StopwordList::builtin());
  return c;
}

const RhymeDictionary& corpus_dictionary() {
  static const RhymeDictionary d = RhymeDictionary::build(shared_classifier(), filtered().all_lines());
  return d;
}

TrainingExample from_golden(const nlohmann::json& j) {
  TrainingExample ex;
  ex.task = *parse_task_name(j["task"].get<std::string>());
  if (j.contains("lines")) ex.input_lines = j["lines"].get<std::vector<std::string>>();
  if (j.contains("flags")) ex.rhyme_flags = j["flags"].get<std::vector<bool>>();
  if (j.contains("syllables")) ex.syllable_tag = j["syllables"].get<int>();
  if (j.contains("ending")) ex.ending_word_tag = j["ending"].get<std::string>();
  if (j.contains("words")) ex.rhyme_list_words = j["words"].get<std::vector<std::string>>();
  return ex;
}

}  // namespace

TEST_CASE("task names and prefixes") {
  CHECK(task_prefix(Task::Control) == "finish lines:");
  CHECK(task_prefix(Task::Rhyme) == "finish lines rhyme:");
  CHECK(task_prefix(Task::Ending) == "finish lines ending:");
  CHECK(task_prefix(Task::RhymeList) == "rhyme list:");
  for (auto t : {Task::Control, Task::Rhyme, Task::Ending, Task::RhymeList}) {
    CHECK(parse_task_name(task_name(t)) == t);
  }
  CHECK_FALSE(parse_task_name("poem"));
  CHECK(parse_dataset_kind("combined-list") == DatasetKind::CombinedList);
  CHECK(dataset_kind_name(DatasetKind::Combined) == "combined");
}

TEST_CASE("finish-lines windows hold the 1-4 lines right before each target") {
  Verse v;
  for (int i = 0; i < 9; ++i) v.lines.push_back("line " + std::to_string(i));
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto examples = make_finish_lines_examples(v, "song", rng);
    REQUIRE(examples.size() == 8);
    for (std::size_t t = 0; t < examples.size(); ++t) {
      const auto& ex = examples[t];
      const std::size_t target = t + 1;
      CHECK(ex.target == v.lines[target]);
      CHECK(ex.task == Task::Control);
      const std::size_t r = ex.input_lines.size();
      CHECK(r >= 1);
      CHECK(r <= std::min<std::size_t>(4, target));
      for (std::size_t k = 0; k < r; ++k) CHECK(ex.input_lines[k] == v.lines[target - r + k]);
      CHECK(ex.rhyme_flags == std::vector<bool>(r, false));
    }
  }
}

TEST_CASE("window sizes cover the whole 1-4 range") {
  Verse v;
  for (int i = 0; i < 12; ++i) v.lines.push_back("line " + std::to_string(i));
  Rng rng(2);
  std::set<std::size_t> sizes;
  for (int trial = 0; trial < 50; ++trial) {
    for (const auto& ex : make_finish_lines_examples(v, "s", rng)) sizes.insert(ex.input_lines.size());
  }
  CHECK(sizes == std::set<std::size_t>{1, 2, 3, 4});
}

TEST_CASE("annotate_rhyme flags every rhyming input line") {
  TrainingExample ex;
  ex.input_lines = {"I keep on doing", "what I like", "this old house is ruin"};
  ex.rhyme_flags = {false, false, false};
  ex.target = "all we ever do is chewing";
  const auto annotated = annotate_rhyme(ex, *shared_classifier());
  REQUIRE(annotated);
  CHECK(annotated->task == Task::Rhyme);
  CHECK(annotated->rhyme_flags == std::vector<bool>{true, false, true});

  ex.target = "nothing here at all";
  CHECK_FALSE(annotate_rhyme(ex, *shared_classifier()));
}

TEST_CASE("syllable and ending-word tags") {
  TrainingExample ex;
  ex.input_lines = {"a line"};
  ex.rhyme_flags = {false};
  ex.target = "close my eyes and see the home!";
  const auto tagged = append_ending_word_tag(append_syllable_tag(ex, shared_classifier()->phonemizer()));
  CHECK(tagged.syllable_tag == 7);
  CHECK(tagged.task == Task::Ending);
  CHECK(tagged.ending_word_tag == std::optional<std::string>("home"));
  TrainingExample rhyme = ex;
  rhyme.task = Task::Rhyme;
  CHECK(append_ending_word_tag(rhyme) == rhyme);
}

TEST_CASE("rendered strings match the tag grammar golden file byte for byte") {
  std::ifstream in(test_data("tag_grammar_golden.json"));
  const auto golden = nlohmann::json::parse(in);
  REQUIRE(golden.size() == 9);
  for (const auto& g : golden) {
    const TrainingExample ex = from_golden(g);
    const std::string expected = g["rendered"].get<std::string>();
    CHECK(render_input(ex) == expected);
    CHECK(parse_input(expected) == ex);
  }
}

TEST_CASE("parse_input rejects text outside the grammar") {
  CHECK_THROWS_AS(parse_input("write lines: hello"), ParseError);
  CHECK_THROWS_AS(parse_input("finish lines:"), ParseError);
  CHECK_THROWS_AS(parse_input("finish lines: a [LINE]  [LINE] b"), ParseError);
  // A non-numeric count is ordinary line text.
  CHECK(parse_input("finish lines: a syllable count: x").input_lines ==
        std::vector<std::string>{"a syllable count: x"});
  CHECK(parse_input("finish lines: go ending word: home").input_lines ==
        std::vector<std::string>{"go ending word: home"});
  CHECK_THROWS_AS(parse_input("finish lines: a [LINE] b [LINE] c [LINE] d [LINE] e"), ParseError);
  CHECK_THROWS_AS(parse_input("finish lines ending: a"), ParseError);
}

TEST_CASE("rhyme-list examples draw 6 rhyming words from one bucket") {
  Rng rng(4);
  const auto examples = make_rhyme_list_examples(corpus_dictionary(), 100, rng);
  REQUIRE(examples.size() == 100);
  for (const auto& ex : examples) {
    CHECK(ex.task == Task::RhymeList);
    CHECK(ex.rhyme_list_words.size() == 5);
    CHECK(corpus_dictionary().bucket_of_word(ex.target) ==
          corpus_dictionary().bucket_of_word(ex.rhyme_list_words.front()));
  }
  CHECK(validate_examples(examples, *shared_classifier()).empty());
  RhymeDictionary tiny(shared_classifier());
  tiny.add("cat");
  tiny.add("hat");
  CHECK_THROWS_AS(make_rhyme_list_examples(tiny, 1, rng), InsufficientRhymes);
  CHECK(make_rhyme_list_examples(tiny, 0, rng).empty());
}

TEST_CASE("combined mixture balances Rhyme and Ending exactly") {
  MixtureOptions opts;
  opts.seed = 17;
  opts.rhyme_list_size = 300;
  const TaskMixture combined = build_combined(filtered(), corpus_dictionary(), opts);
  REQUIRE(combined.tasks.size() == 2);
  const auto* rhyme = combined.find(Task::Rhyme);
  const auto* ending = combined.find(Task::Ending);
  REQUIRE(rhyme);
  REQUIRE(ending);
  CHECK(rhyme->examples.size() == ending->examples.size());
  CHECK(rhyme->examples.size() > 0);
  CHECK(rhyme->weight == ending->weight);

  opts.include_rhyme_list = true;
  const TaskMixture with_list = build_combined(filtered(), corpus_dictionary(), opts);
  REQUIRE(with_list.tasks.size() == 3);
  CHECK(with_list.find(Task::RhymeList)->examples.size() == 300);
  for (const auto& t : with_list.tasks) {
    CHECK(t.weight == doctest::Approx(1.0 / 3.0));
    CHECK(validate_examples(t.examples, *shared_classifier()).empty());
  }
  // The rhyme and ending halves do not depend on the rhyme-list flag.
  CHECK(with_list.find(Task::Rhyme)->examples == rhyme->examples);
  CHECK(with_list.find(Task::Ending)->examples == ending->examples);
}

TEST_CASE("single-task datasets") {
  MixtureOptions opts;
  opts.seed = 3;
  const auto control = build_dataset(DatasetKind::Control, filtered(), corpus_dictionary(), opts);
  const auto rhyme = build_dataset(DatasetKind::Rhyme, filtered(), corpus_dictionary(), opts);
  const auto ending = build_dataset(DatasetKind::Ending, filtered(), corpus_dictionary(), opts);
  CHECK(control.tasks.at(0).task == Task::Control);
  CHECK(rhyme.tasks.at(0).task == Task::Rhyme);
  CHECK(ending.tasks.at(0).task == Task::Ending);
  CHECK(rhyme.tasks[0].examples.size() < control.tasks[0].examples.size());
  for (const auto& ex : control.tasks[0].examples) CHECK_FALSE(ex.syllable_tag);
  opts.single_task_syllable_tag = true;
  const auto tagged = build_dataset(DatasetKind::Control, filtered(), corpus_dictionary(), opts);
  for (const auto& ex : tagged.tasks[0].examples) CHECK(ex.syllable_tag);
  for (const auto* m : {&control, &rhyme, &ending, &tagged}) {
    CHECK(validate_examples(m->tasks[0].examples, *shared_classifier()).empty());
  }
}

TEST_CASE("serial and parallel example generation agree") {
  const auto serial = make_corpus_examples(filtered(), 21, Execution::Serial);
  const auto parallel = make_corpus_examples(filtered(), 21, Execution::Parallel);
  CHECK(serial == parallel);
  CHECK(make_corpus_examples(filtered(), 22) != serial);
}

TEST_CASE("validator reports broken invariants") {
  TrainingExample ex;
  ex.task = Task::Ending;
  ex.input_lines = {"a", "b", "c", "d", "e"};
  ex.rhyme_flags = {false, false, false, false, false};
  ex.target = "go home";
  ex.ending_word_tag = "away";
  ex.syllable_tag = 9;
  const auto issues = validate_examples({ex}, *shared_classifier());
  CHECK(issues.size() >= 3);

  TrainingExample bad_flag;
  bad_flag.task = Task::Rhyme;
  bad_flag.input_lines = {"the cat"};
  bad_flag.rhyme_flags = {true};
  bad_flag.target = "the dog";
  CHECK(validate_examples({bad_flag}, *shared_classifier()).size() == 1);
}

TEST_CASE("TSV round trip and malformed rows") {
  MixtureOptions opts;
  opts.seed = 1;
  const auto mix = build_dataset(DatasetKind::Combined, filtered(), corpus_dictionary(), opts);
  const auto& examples = mix.tasks[0].examples;
  std::ostringstream out;
  write_tsv(examples, out);
  std::istringstream in(out.str());
  const auto rows = read_tsv(in);
  REQUIRE(rows.size() == examples.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == to_row(examples[i]));

  TrainingExample tabbed = examples.front();
  tabbed.target = "a\tb";
  std::ostringstream sink;
  CHECK_THROWS_AS(write_tsv({tabbed}, sink), MalformedRow);

  std::istringstream three("a\tb\tc\n");
  CHECK_THROWS_AS(read_tsv(three), MalformedRow);
  std::istringstream one("just one cell\n");
  CHECK_THROWS_AS(read_tsv(one), MalformedRow);
  std::istringstream empty("");
  CHECK(read_tsv(empty).empty());
}

TEST_CASE("manifest round trip") {
  TempDir dir;
  const std::vector<ManifestEntry> entries = {{"train", Task::Rhyme, "train_rhyme.tsv", 96, 0.5},
                                              {"train", Task::Ending, "train_ending.tsv", 96, 0.5}};
  write_manifest(entries, dir / "manifest.tsv");
  const auto back = read_manifest(dir / "manifest.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].task == Task::Ending);
  CHECK(back[1].count == 96);
  CHECK(back[1].weight == 0.5);
  CHECK(linesmith::testing::slurp(dir / "manifest.tsv").rfind("split\ttask\tpath\tcount\tweight\n", 0) == 0);
  linesmith::testing::spit(dir / "bad.tsv", "split\ttask\tpath\tcount\tweight\ntrain\trhyme\tx\tmany\t1\n");
  CHECK_THROWS_AS(read_manifest(dir / "bad.tsv"), MalformedRow);
}
