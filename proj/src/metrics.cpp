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

#include "linesmith/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>

#include "linesmith/error.hpp"
#include "linesmith/rng.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::uint64_t> ngram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<Ngram, std::uint64_t> out;
  const auto len = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= len; ++i) ++out[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  return out;
}

void check_paired(std::size_t a, std::size_t b) {
  if (a != b) {
    throw LengthMismatch(std::to_string(a) + " predictions for " + std::to_string(b) + " targets");
  }
  if (a == 0) throw LengthMismatch("no predictions to score");
}

// Per-item values, filled in parallel, reduced serially in index order so
// the floating-point result does not depend on the schedule.
template <typename F>
std::vector<double> per_item(std::size_t n, Execution exec, F&& f) {
  std::vector<double> out(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = f(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = f(static_cast<std::size_t>(i));
  }
  return out;
}

double rms(const std::vector<double>& diffs) {
  double sum = 0;
  for (double d : diffs) sum += d * d;
  return std::sqrt(sum / static_cast<double>(diffs.size()));
}

double mean(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size());
    totals.resize(other.totals.size());
  }
  for (std::size_t i = 0; i < other.matches.size(); ++i) {
    matches[i] += other.matches[i];
    totals[i] += other.totals[i];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(const std::vector<std::string>& hypothesis,
                     const std::vector<std::string>& reference, int max_order) {
  BleuStats s;
  s.matches.assign(static_cast<std::size_t>(max_order), 0);
  s.totals.assign(static_cast<std::size_t>(max_order), 0);
  s.hypothesis_length = hypothesis.size();
  s.reference_length = reference.size();
  for (int n = 1; n <= max_order; ++n) {
    const auto hyp = ngram_counts(hypothesis, n);
    const auto ref = ngram_counts(reference, n);
    for (const auto& [gram, count] : hyp) {
      s.totals[n - 1] += count;
      const auto it = ref.find(gram);
      if (it != ref.end()) s.matches[n - 1] += std::min(count, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& stats, const BleuConfig& config) {
  if (stats.matches.empty() || stats.matches[0] == 0) return 0.0;
  double log_sum = 0;
  int orders = 0;
  for (std::size_t i = 0; i < stats.matches.size(); ++i) {
    if (stats.totals[i] == 0) continue;
    const double num = stats.matches[i] == 0 ? config.epsilon : static_cast<double>(stats.matches[i]);
    log_sum += std::log(num / static_cast<double>(stats.totals[i]));
    ++orders;
  }
  const double c = static_cast<double>(stats.hypothesis_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / orders);
}

double corpus_bleu(const std::vector<std::string>& predictions,
                   const std::vector<std::string>& targets, const BleuConfig& config,
                   Execution exec) {
  check_paired(predictions.size(), targets.size());
  std::vector<BleuStats> parts(predictions.size());
  const auto count = static_cast<std::ptrdiff_t>(predictions.size());
  auto one = [&](std::ptrdiff_t i) {
    parts[i] = bleu_stats(tokenize_line(predictions[i]), tokenize_line(targets[i]), config.max_order);
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
  BleuStats total;
  for (const auto& p : parts) total += p;
  return bleu_from_stats(total, config);
}

double type_token_ratio(std::string_view line) {
  const auto tokens = tokenize_line(line);
  if (tokens.empty()) return 0.0;
  const std::set<std::string> types(tokens.begin(), tokens.end());
  return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

double lexical_diversity_rmse(const std::vector<std::string>& predictions,
                              const std::vector<std::string>& targets, MetricCounters* counters,
                              Execution exec) {
  check_paired(predictions.size(), targets.size());
  const auto diffs = per_item(predictions.size(), exec, [&](std::size_t i) {
    return type_token_ratio(predictions[i]) - type_token_ratio(targets[i]);
  });
  if (counters) {
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      if (tokenize_line(predictions[i]).empty()) ++counters->empty_lines;
      if (tokenize_line(targets[i]).empty()) ++counters->empty_lines;
    }
  }
  return rms(diffs);
}

double rhyme_score(const std::vector<std::string>& predictions,
                   const std::vector<std::vector<std::string>>& input_end_words,
                   const RhymeClassifier& classifier, MetricCounters* counters, Execution exec) {
  check_paired(predictions.size(), input_end_words.size());
  // 1 rhymes, 0 does not, -1 unphonemizable end word.
  const auto hits = per_item(predictions.size(), exec, [&](std::size_t i) -> double {
    const auto key = classifier.try_key_of(final_word(predictions[i]));
    if (!key) return -1.0;
    for (const auto& w : input_end_words[i]) {
      const auto other = classifier.try_key_of(w);
      if (other && classifier.classify_keys(*key, *other) != RhymeClass::None) return 1.0;
    }
    return 0.0;
  });
  std::size_t rhyming = 0;
  for (double h : hits) {
    if (h > 0) ++rhyming;
    if (h < 0 && counters) ++counters->unphonemizable_end_words;
  }
  return static_cast<double>(rhyming) / static_cast<double>(hits.size());
}

double syllable_rmse(const std::vector<std::string>& predictions,
                     const std::vector<std::string>& targets, const Phonemizer& phonemizer,
                     Execution exec) {
  check_paired(predictions.size(), targets.size());
  return rms(per_item(predictions.size(), exec, [&](std::size_t i) {
    return static_cast<double>(phonemizer.line_syllables(predictions[i])) -
           static_cast<double>(phonemizer.line_syllables(targets[i]));
  }));
}

double end_word_accuracy(const std::vector<std::string>& predictions,
                         const std::vector<std::string>& targets, Execution exec) {
  check_paired(predictions.size(), targets.size());
  return mean(per_item(predictions.size(), exec, [&](std::size_t i) {
    return final_word(predictions[i]) == final_word(targets[i]) ? 1.0 : 0.0;
  }));
}

std::vector<std::string> input_end_words(const TrainingExample& parsed_input) {
  if (parsed_input.task == Task::RhymeList) return parsed_input.rhyme_list_words;
  std::vector<std::string> out;
  for (const auto& line : parsed_input.input_lines) {
    std::string w = final_word(line);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

nlohmann::ordered_json EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["bleu"] = bleu;
  j["lexical_diversity_rmse"] = lexical_diversity_rmse;
  j["rhyme_score"] = rhyme_score;
  j["syllable_rmse"] = syllable_rmse;
  j["end_word_accuracy"] = end_word_accuracy;
  j["n_examples"] = n_examples;
  j["empty_predictions"] = empty_predictions;
  j["unphonemizable_end_words"] = unphonemizable_end_words;
  j["backend_id"] = backend_id;
  j["dataset_id"] = dataset_id;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  return j;
}

std::string dataset_id_of(const std::string& name, const std::vector<TsvRow>& rows) {
  std::uint64_t h = fnv1a(name);
  for (const auto& r : rows) {
    h = fnv1a(r.input, h);
    h = fnv1a("\t", h);
    h = fnv1a(r.target, h);
    h = fnv1a("\n", h);
  }
  return name + "@" + hex64(h);
}

EvaluationReport evaluate(GenerationBackend& backend, const std::vector<TsvRow>& rows,
                          const RhymeClassifier& classifier, const EvaluateOptions& options) {
  if (rows.empty()) throw EmptyCorpus("evaluation set has no rows");
  const std::size_t n = rows.size();
  std::vector<std::string> predictions(n);
  std::vector<std::exception_ptr> failures(n);
  auto predict = [&](std::size_t i) {
    try {
      Rng rng(mix_seed(options.seed, "evaluate", i));
      auto lines = backend.generate_for(rows[i], 1, rng);
      if (!lines.empty()) predictions[i] = std::move(lines.front());
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (options.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) predict(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) predict(static_cast<std::size_t>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    const std::size_t done = static_cast<std::size_t>(
        std::count(failures.begin(), failures.end(), nullptr));
    try {
      std::rethrow_exception(failures[i]);
    } catch (const BackendUnavailable& e) {
      const std::string msg = "evaluation aborted: " + std::to_string(done) + " of " +
                              std::to_string(n) + " examples completed; first failure at row " +
                              std::to_string(i + 1) + ": " + e.what();
      if (options.log) *options.log << msg << "\n";
      throw BackendUnavailable(msg);
    }
  }

  std::vector<std::string> targets(n);
  std::vector<std::vector<std::string>> end_words(n);
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = rows[i].target;
    try {
      end_words[i] = input_end_words(parse_input(rows[i].input));
    } catch (const ParseError&) {
      end_words[i] = {};
    }
  }

  EvaluationReport report;
  MetricCounters counters;
  report.n_examples = n;
  report.bleu = corpus_bleu(predictions, targets, options.bleu, options.exec);
  report.lexical_diversity_rmse = lexical_diversity_rmse(predictions, targets, nullptr, options.exec);
  report.rhyme_score = rhyme_score(predictions, end_words, classifier, &counters, options.exec);
  report.syllable_rmse = syllable_rmse(predictions, targets, classifier.phonemizer(), options.exec);
  report.end_word_accuracy = end_word_accuracy(predictions, targets, options.exec);
  report.empty_predictions = static_cast<std::size_t>(
      std::count_if(predictions.begin(), predictions.end(),
                    [](const std::string& p) { return tokenize_line(p).empty(); }));
  report.unphonemizable_end_words = counters.unphonemizable_end_words;
  report.backend_id = backend.id();
  report.dataset_id = options.dataset_id;
  report.seed = options.seed;
  const std::string config = "bleu:max_order=" + std::to_string(options.bleu.max_order) +
                             ";epsilon=" + std::to_string(options.bleu.epsilon) +
                             ";tokens=normalized;bp=corpus;k=1;seed=" +
                             std::to_string(options.seed) +
                             ";table=" + std::to_string(classifier.table().version());
  report.config_hash = hex64(fnv1a(config));
  if (options.log) *options.log << "evaluated " << n << " examples\n";
  return report;
}

}  // namespace linesmith
