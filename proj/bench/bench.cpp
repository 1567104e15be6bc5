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

// Serial reference paths against their OpenMP counterparts on the
// synthetic corpus scaled up by song duplication.

#include <benchmark/benchmark.h>

#include "linesmith/corpus.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/metrics.hpp"
#include "linesmith/resources.hpp"
#include "linesmith/rhyme.hpp"

namespace {

using namespace linesmith;

const Corpus& base_corpus() {
  static const Corpus c = ingest(default_data_dir() / "synthetic_corpus.jsonl");
  return c;
}

Corpus scaled(int copies) {
  Corpus out;
  for (int i = 0; i < copies; ++i) {
    for (auto song : base_corpus().songs) {
      song.id += "-" + std::to_string(i);
      out.songs.push_back(std::move(song));
    }
  }
  return out;
}

std::shared_ptr<const RhymeClassifier> classifier() {
  static const auto c = load_classifier(ResourceConfig{});
  return c;
}

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_Preprocess(benchmark::State& state) {
  const Corpus corpus = scaled(static_cast<int>(state.range(0)));
  const auto stopwords = StopwordList::builtin();
  for (auto _ : state) {
    benchmark::DoNotOptimize(preprocess(corpus, FilterRules{}, stopwords, nullptr, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.verse_count()));
}

void BM_CorpusExamples(benchmark::State& state) {
  const Corpus corpus = preprocess(scaled(static_cast<int>(state.range(0))), FilterRules{}, StopwordList::builtin());
  for (auto _ : state) benchmark::DoNotOptimize(make_corpus_examples(corpus, 7, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.verse_count()));
}

void BM_RhymeDictionary(benchmark::State& state) {
  const auto lines = scaled(static_cast<int>(state.range(0))).all_lines();
  for (auto _ : state) benchmark::DoNotOptimize(RhymeDictionary::build(classifier(), lines, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lines.size()));
}

void BM_Metrics(benchmark::State& state) {
  const Corpus corpus = preprocess(scaled(static_cast<int>(state.range(0))), FilterRules{}, StopwordList::builtin());
  const auto examples = make_corpus_examples(corpus, 7);
  std::vector<std::string> preds, targets;
  std::vector<std::vector<std::string>> ends;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    targets.push_back(examples[i].target);
    preds.push_back(examples[(i * 7 + 3) % examples.size()].target);
    ends.push_back(input_end_words(examples[i]));
  }
  const auto exec = mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus_bleu(preds, targets, {}, exec));
    benchmark::DoNotOptimize(lexical_diversity_rmse(preds, targets, nullptr, exec));
    benchmark::DoNotOptimize(rhyme_score(preds, ends, *classifier(), nullptr, exec));
    benchmark::DoNotOptimize(syllable_rmse(preds, targets, classifier()->phonemizer(), exec));
    benchmark::DoNotOptimize(end_word_accuracy(preds, targets, exec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(preds.size()));
}

// range(0): corpus copies; range(1): 0 serial, 1 parallel.
BENCHMARK(BM_Preprocess)->ArgsProduct({{10, 100}, {0, 1}})->ArgNames({"copies", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorpusExamples)->ArgsProduct({{10, 100}, {0, 1}})->ArgNames({"copies", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhymeDictionary)->ArgsProduct({{10, 100}, {0, 1}})->ArgNames({"copies", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Metrics)->ArgsProduct({{10, 100}, {0, 1}})->ArgNames({"copies", "parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
