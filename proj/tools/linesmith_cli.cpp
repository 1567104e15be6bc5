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

// linesmith: batch entry points for the lyric pipeline.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 backend error.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linesmith/backend.hpp"
#include "linesmith/corpus.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/error.hpp"
#include "linesmith/generation.hpp"
#include "linesmith/metrics.hpp"
#include "linesmith/ngram.hpp"
#include "linesmith/resources.hpp"
#include "linesmith/service.hpp"

namespace fs = std::filesystem;
using namespace linesmith;
using OJson = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct Globals {
  std::uint64_t seed = 2021;
  bool json = false;
  std::string data_dir;
  std::string dictionary;
  std::string table;
  std::string g2p_command;
  bool engine_first = false;
};

ResourceConfig resource_config(const Globals& g) {
  ResourceConfig rc;
  if (!g.data_dir.empty()) rc.data_dir = g.data_dir;
  if (!g.dictionary.empty()) rc.dictionary = fs::path(g.dictionary);
  if (!g.table.empty()) rc.table = fs::path(g.table);
  if (!g.g2p_command.empty()) rc.g2p_command = g.g2p_command;
  rc.phonemizer.engine_first = g.engine_first;
  return rc;
}

void emit(const Globals& g, const OJson& j, const std::string& human) {
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

NgramModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path);
  return NgramModel::load(in);
}

// Rhyme candidates for the baseline are the words the model has seen.
std::shared_ptr<const RhymeDictionary> model_dictionary(std::shared_ptr<const RhymeClassifier> c,
                                                        const NgramModel& model) {
  auto dict = std::make_shared<RhymeDictionary>(std::move(c));
  for (const auto& [word, count] : model.unigrams()) {
    if (word != kLineEnd) dict->add(word, count);
  }
  return dict;
}

struct BackendFlags {
  std::string kind = "baseline";
  std::string model;
  std::string corpus;
  int order = 3;
  std::string remote_url;
  int timeout_ms = 10000;
  std::string auth_header;
  std::size_t max_in_flight = 4;
};

void add_backend_flags(CLI::App* app, BackendFlags& f) {
  app->add_option("--backend", f.kind, "baseline | remote | echo")->envname("LINESMITH_BACKEND")
      ->check(CLI::IsMember({"baseline", "remote", "echo"}));
  app->add_option("--model", f.model, "Serialized n-gram model for the baseline");
  app->add_option("--corpus", f.corpus, "Corpus to train the baseline on when no --model is given")
      ->envname("LINESMITH_CORPUS");
  app->add_option("--order", f.order, "n-gram order when training on the fly")->check(CLI::Range(2, 8));
  app->add_option("--remote-url", f.remote_url, "Remote endpoint, http://host:port/path")
      ->envname("LINESMITH_REMOTE_URL");
  app->add_option("--timeout-ms", f.timeout_ms, "Remote request timeout");
  app->add_option("--auth-header", f.auth_header, "Remote auth header, 'Name: value'");
  app->add_option("--max-in-flight", f.max_in_flight, "Concurrent remote requests");
}

struct BackendBundle {
  std::shared_ptr<GenerationBackend> backend;
  std::shared_ptr<const RhymeDictionary> dictionary;
};

BackendBundle make_backend(const BackendFlags& f, const Globals& g,
                           const std::vector<TsvRow>* echo_rows = nullptr) {
  auto classifier = load_classifier(resource_config(g));
  BackendBundle b;
  if (f.kind == "remote") {
    if (f.remote_url.empty()) throw InvalidRequest("--remote-url is required for the remote backend");
    RemoteConfig rc;
    rc.url = f.remote_url;
    rc.timeout_ms = f.timeout_ms;
    if (!f.auth_header.empty()) rc.auth_header = f.auth_header;
    rc.max_in_flight = f.max_in_flight;
    b.backend = std::make_shared<RemoteBackend>(rc);
    b.dictionary = f.corpus.empty()
                       ? std::make_shared<const RhymeDictionary>(classifier)
                       : build_rhyme_dictionary(classifier, ingest(f.corpus));
    return b;
  }
  if (f.kind == "echo") {
    if (!echo_rows) throw InvalidRequest("the echo backend is only available to evaluate");
    b.backend = std::make_shared<EchoBackend>(*echo_rows);
    b.dictionary = std::make_shared<const RhymeDictionary>(classifier);
    return b;
  }
  std::shared_ptr<const NgramModel> model;
  if (!f.model.empty()) {
    model = std::make_shared<const NgramModel>(load_model(f.model));
  } else {
    const fs::path corpus = f.corpus.empty() ? default_data_dir() / "synthetic_corpus.jsonl"
                                             : fs::path(f.corpus);
    model = std::make_shared<const NgramModel>(NgramModel::train(ingest(corpus).all_lines(), f.order));
  }
  b.dictionary = model_dictionary(classifier, *model);
  b.backend = std::make_shared<NgramBackend>(model, b.dictionary);
  return b;
}

std::string report_line(const ConstraintReport& r) {
  std::string s = "syllables " + std::to_string(r.syllables) + "/" + std::to_string(r.syllable_target) +
                  " (off by " + std::to_string(r.syllable_distance) + ")";
  if (r.required_end_word) s += r.end_word_match ? ", ends with " + *r.required_end_word : ", wrong end word";
  s += ", rhyme " + std::string(to_string(r.rhyme_class));
  if (!r.rhymes_with.empty()) s += " with " + r.rhymes_with;
  return s;
}

volatile std::sig_atomic_t g_stop = 0;

extern "C" void handle_term(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linesmith: lyric line completion toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str()->envname("LINESMITH_SEED");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--data-dir", g.data_dir, "Directory with the pronouncing dictionary and rhyme table");
  app.add_option("--dictionary", g.dictionary, "Pronouncing dictionary TSV");
  app.add_option("--table", g.table, "Near-rhyme equivalence table")->envname("LINESMITH_TABLE");
  app.add_option("--g2p-command", g.g2p_command, "External G2P command with {word} placeholder");
  app.add_flag("--engine-first", g.engine_first, "Prefer the G2P engine over the dictionary");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Filter a raw corpus");
  std::string pre_in, pre_out, pre_split_dir, pre_allow_corpus;
  FilterRules rules;
  double test_fraction = 0.1;
  std::vector<std::string> deny, allow;
  pre->add_option("--corpus", pre_in, "Raw corpus JSONL")->required();
  pre->add_option("--out", pre_out, "Filtered corpus JSONL")->required();
  pre->add_option("--similarity", rules.dedup_threshold, "Drop a line this similar to the previous")->capture_default_str();
  pre->add_option("--min-lines", rules.min_verse_lines, "Drop verses with fewer lines")->capture_default_str();
  pre->add_option("--min-chars", rules.min_verse_chars, "Drop verses with fewer characters")->capture_default_str();
  pre->add_option("--stopword-floor", rules.stopword_floor, "English stopword ratio for untagged songs")->capture_default_str();
  pre->add_option("--split-dir", pre_split_dir, "Also write train.jsonl / test.jsonl here");
  pre->add_option("--test-fraction", test_fraction, "Share of songs held out")->capture_default_str();
  pre->add_option("--deny-artist", deny, "Artist removed before the split");
  pre->add_option("--allow-artist", allow, "Artist whose songs from --allow-corpus are added");
  pre->add_option("--allow-corpus", pre_allow_corpus, "Supplementary corpus for --allow-artist");

  // build-dataset
  auto* bd = app.add_subcommand("build-dataset", "Build task TSVs and a manifest");
  std::string bd_corpus, bd_out, bd_kind = "combined";
  std::size_t list_size = kDefaultRhymeListSize;
  bool bd_no_split = false, bd_single_syll = false;
  double bd_test_fraction = 0.1;
  bd->add_option("--corpus", bd_corpus, "Filtered corpus JSONL")->required();
  bd->add_option("--out", bd_out, "Output directory")->required();
  bd->add_option("--kind", bd_kind, "control | rhyme | ending | combined | combined-list")
      ->check(CLI::IsMember({"control", "rhyme", "ending", "combined", "combined-list"}))
      ->capture_default_str();
  bd->add_option("--rhyme-list-size", list_size, "Rhyme-list examples in the train split")->capture_default_str();
  bd->add_option("--test-fraction", bd_test_fraction, "Share of songs held out")->capture_default_str();
  bd->add_flag("--no-split", bd_no_split, "Build one `all` split from the whole corpus");
  bd->add_flag("--syllable-tags", bd_single_syll, "Syllable tags on single-task datasets");

  // train-baseline
  auto* tb = app.add_subcommand("train-baseline", "Train the n-gram baseline");
  std::string tb_corpus, tb_out;
  int tb_order = 3;
  tb->add_option("--corpus", tb_corpus, "Corpus JSONL")->required();
  tb->add_option("--out", tb_out, "Model file")->required();
  tb->add_option("--order", tb_order, "n-gram order")->check(CLI::Range(2, 8))->capture_default_str();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Score a backend on a test TSV");
  BackendFlags ev_backend;
  std::string ev_data, ev_out;
  bool ev_serial = false;
  add_backend_flags(ev, ev_backend);
  ev->add_option("--data", ev_data, "Test TSV")->required();
  ev->add_option("--out", ev_out, "Report JSON file");
  ev->add_flag("--serial", ev_serial, "Disable OpenMP");

  // suggest
  auto* sg = app.add_subcommand("suggest", "Suggest next lines");
  BackendFlags sg_backend;
  SuggestionRequest request;
  int sg_syllables = 0;
  std::string sg_end;
  sg->add_option("lines", request.input_lines, "1 to 4 input lines")->required();
  sg->add_option("--syllables", sg_syllables, "Syllable target (hard constraint)");
  sg->add_option("--end-word", sg_end, "Required ending word");
  sg->add_flag("--force-rhyme", request.force_rhyme, "Query the top rhymes of the last word");
  sg->add_option("-k", request.k, "Candidates per query")->capture_default_str();
  add_backend_flags(sg, sg_backend);

  // serve
  auto* sv = app.add_subcommand("serve", "Run the HTTP service");
  BackendFlags sv_backend;
  ServiceConfig sv_config;
  std::string session_log = "sessions.jsonl";
  sv->add_option("--host", sv_config.host)->capture_default_str();
  sv->add_option("--port", sv_config.port, "0 picks a free port")->capture_default_str()->envname("LINESMITH_PORT");
  sv->add_option("--cors-origin", sv_config.cors_origin)->capture_default_str();
  sv->add_option("--session-log", session_log, "Append-only session log")->capture_default_str();
  add_backend_flags(sv, sv_backend);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*pre) {
      Corpus raw = ingest(pre_in);
      PreprocessStats stats;
      Corpus kept = preprocess(raw, rules, StopwordList::builtin(), &stats, Execution::Parallel);
      write_corpus(kept, pre_out);
      OJson j = {{"songs_in", stats.songs_in},
                 {"verses_in", stats.verses_in},
                 {"songs_dropped_language", stats.songs_dropped_language},
                 {"lines_dropped_dedup", stats.lines_dropped_dedup},
                 {"verses_dropped_line_count", stats.verses_dropped_line_count},
                 {"verses_dropped_char_count", stats.verses_dropped_char_count},
                 {"songs_dropped_empty", stats.songs_dropped_empty},
                 {"songs_out", stats.songs_out},
                 {"verses_out", stats.verses_out},
                 {"total_drops", stats.total_drops()}};
      std::string human;
      for (const auto& [k, v] : j.items()) human += k + ": " + v.dump() + "\n";
      if (!pre_split_dir.empty()) {
        SplitConfig sc;
        sc.seed = g.seed;
        sc.test_fraction = test_fraction;
        sc.deny_artists.insert(deny.begin(), deny.end());
        sc.allow_artists.insert(allow.begin(), allow.end());
        std::optional<Corpus> extra;
        if (!pre_allow_corpus.empty()) extra = ingest(pre_allow_corpus);
        const CorpusSplit split = split_by_song(kept, sc, extra ? &*extra : nullptr);
        fs::create_directories(pre_split_dir);
        write_corpus(split.train, fs::path(pre_split_dir) / "train.jsonl");
        write_corpus(split.test, fs::path(pre_split_dir) / "test.jsonl");
        j["train_songs"] = split.train.songs.size();
        j["test_songs"] = split.test.songs.size();
        human += "train_songs: " + std::to_string(split.train.songs.size()) + "\n";
        human += "test_songs: " + std::to_string(split.test.songs.size()) + "\n";
      }
      emit(g, j, human);
      return 0;
    }

    if (*bd) {
      const Corpus corpus = ingest(bd_corpus);
      auto classifier = load_classifier(resource_config(g));
      auto dictionary = build_rhyme_dictionary(classifier, corpus);
      const DatasetKind kind = *parse_dataset_kind(bd_kind);
      std::vector<std::pair<std::string, Corpus>> splits;
      if (bd_no_split) {
        splits.emplace_back("all", corpus);
      } else {
        SplitConfig sc;
        sc.seed = g.seed;
        sc.test_fraction = bd_test_fraction;
        CorpusSplit split = split_by_song(corpus, sc);
        splits.emplace_back("train", std::move(split.train));
        splits.emplace_back("test", std::move(split.test));
      }
      fs::create_directories(bd_out);
      std::vector<ManifestEntry> manifest;
      OJson j = OJson::array();
      std::string human;
      for (const auto& [name, part] : splits) {
        MixtureOptions mo;
        mo.seed = mix_seed(g.seed, name);
        mo.rhyme_list_size = name == "test"
                                 ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                                                list_size * bd_test_fraction + 0.5))
                                 : list_size;
        mo.single_task_syllable_tag = bd_single_syll;
        mo.exec = Execution::Parallel;
        const TaskMixture mixture = build_dataset(kind, part, *dictionary, mo);
        for (const auto& t : mixture.tasks) {
          const std::string file = name + "_" + std::string(task_name(t.task)) + ".tsv";
          write_tsv(t.examples, fs::path(bd_out) / file);
          manifest.push_back({name, t.task, file, t.examples.size(), t.weight});
          j.push_back({{"split", name}, {"task", task_name(t.task)}, {"path", file},
                       {"count", t.examples.size()}, {"weight", t.weight}});
          human += name + "\t" + std::string(task_name(t.task)) + "\t" + file + "\t" +
                   std::to_string(t.examples.size()) + "\n";
        }
      }
      write_manifest(manifest, fs::path(bd_out) / "manifest.tsv");
      emit(g, j, human);
      return 0;
    }

    if (*tb) {
      const NgramModel model = NgramModel::train(ingest(tb_corpus).all_lines(), tb_order);
      std::ofstream out(tb_out);
      if (!out) throw IoError("cannot write " + tb_out);
      model.save(out);
      out.close();
      if (!out) throw IoError("cannot write " + tb_out);
      emit(g, OJson{{"path", tb_out}, {"order", model.order()}, {"vocabulary", model.vocabulary_size()}},
           "wrote " + tb_out + " (order " + std::to_string(model.order()) + ", " +
               std::to_string(model.vocabulary_size()) + " types)\n");
      return 0;
    }

    if (*ev) {
      if (!fs::exists(ev_data)) throw IoError("no such dataset: " + ev_data);
      const auto rows = read_tsv(ev_data);
      const BackendBundle b = make_backend(ev_backend, g, &rows);
      EvaluateOptions eo;
      eo.seed = g.seed;
      eo.dataset_id = dataset_id_of(fs::path(ev_data).filename().string(), rows);
      eo.exec = ev_serial ? Execution::Serial : Execution::Parallel;
      eo.log = &std::cerr;
      const EvaluationReport report = evaluate(*b.backend, rows, b.dictionary->classifier(), eo);
      const std::string text = report.to_json().dump(2) + "\n";
      if (!ev_out.empty()) {
        std::ofstream out(ev_out);
        out << text;
        if (!out) throw IoError("cannot write " + ev_out);
      }
      if (g.json || ev_out.empty()) {
        std::cout << text;
      } else {
        std::printf("bleu %.4f\nlexical_diversity_rmse %.4f\nrhyme_score %.4f\nsyllable_rmse %.4f\n"
                    "end_word_accuracy %.4f\nn_examples %zu\n",
                    report.bleu, report.lexical_diversity_rmse, report.rhyme_score,
                    report.syllable_rmse, report.end_word_accuracy, report.n_examples);
      }
      return 0;
    }

    if (*sg) {
      if (sg->count("--syllables")) request.syllable_target = sg_syllables;
      if (!sg_end.empty()) request.ending_word = sg_end;
      request.validate();
      const BackendBundle b = make_backend(sg_backend, g);
      Suggester suggester(b.dictionary);
      Rng rng(g.seed);
      const SuggestionSet set = suggester.suggest(request, *b.backend, rng);
      std::string human;
      for (const auto& a : set.advisories) human += "note: " + a + "\n";
      for (const auto& c : set.candidates) {
        human += c.line + "\n    " + report_line(c.report) + ", attempts " + std::to_string(c.attempts) + "\n";
      }
      OJson j = to_json(set);
      j["backend"] = b.backend->id();
      emit(g, j, human);
      return 0;
    }

    if (*sv) {
      const BackendBundle b = make_backend(sv_backend, g);
      auto sessions = std::make_shared<SessionStore>(fs::path(session_log));
      sv_config.seed = g.seed;
      Service service(b.dictionary, b.backend, sessions, sv_config);
      std::signal(SIGTERM, handle_term);
      std::signal(SIGINT, handle_term);
      const int port = service.start();
      std::cerr << "listening on " << sv_config.host << ":" << port << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      service.stop();
      sessions->flush();
      std::cerr << "stopped; session log flushed\n";
      return 0;
    }
  } catch (const BackendUnavailable& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const MalformedResponse& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const InvalidRequest& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
