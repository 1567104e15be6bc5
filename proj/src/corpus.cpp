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

#include "linesmith/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "linesmith/error.hpp"
#include "linesmith/rng.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

using nlohmann::json;

constexpr std::string_view kBuiltinStopwords =
    "a about above after again all am an and any are as at be because been before being below "
    "between both but by can could did do does doing don't down during each few for from "
    "further had has have having he her here hers him his how i i'm if in into is it it's its "
    "just me more most my myself no nor not now of off on once only or other our ours out over "
    "own same she should so some such than that the their them then there these they this "
    "those through to too under until up very was we were what when where which while who whom "
    "why will with would you you're your yours";

std::string require_string(const json& rec, const char* field, std::size_t record) {
  const auto it = rec.find(field);
  if (it == rec.end()) throw ParseError(std::string("missing `") + field + "` field", record);
  if (!it->is_string()) throw ParseError(std::string("`") + field + "` must be a string", record);
  return it->get<std::string>();
}

Verse parse_verse(const json& v, std::size_t record) {
  const json* lines = &v;
  if (v.is_object()) {
    const auto it = v.find("lines");
    if (it == v.end()) throw ParseError("verse missing `lines` field", record);
    lines = &*it;
  }
  if (!lines->is_array()) throw ParseError("verse lines must be an array", record);
  Verse verse;
  for (const auto& line : *lines) {
    if (!line.is_string()) throw ParseError("verse line must be a string", record);
    std::string clean = sanitize_line(line.get<std::string>());
    if (!clean.empty()) verse.lines.push_back(std::move(clean));
  }
  return verse;
}

// Per-song kernel shared by the serial and OpenMP paths.
struct SongResult {
  std::optional<Song> song;
  PreprocessStats stats;
};

SongResult preprocess_song(const Song& song, const FilterRules& rules,
                           const StopwordList& stopwords) {
  SongResult result;
  Corpus one;
  one.songs.push_back(song);
  Corpus kept = filter_language(one, stopwords, rules.stopword_floor, &result.stats);
  if (kept.songs.empty()) return result;
  for (auto& verse : kept.songs.front().verses) {
    const std::size_t before = verse.lines.size();
    verse = dedup_consecutive(verse, rules.dedup_threshold);
    result.stats.lines_dropped_dedup += before - verse.lines.size();
  }
  Corpus filtered = filter_verses(kept, rules, &result.stats);
  if (!filtered.songs.empty()) result.song = std::move(filtered.songs.front());
  return result;
}

void accumulate(PreprocessStats& into, const PreprocessStats& from) {
  into.songs_dropped_language += from.songs_dropped_language;
  into.lines_dropped_dedup += from.lines_dropped_dedup;
  into.verses_dropped_line_count += from.verses_dropped_line_count;
  into.verses_dropped_char_count += from.verses_dropped_char_count;
  into.songs_dropped_empty += from.songs_dropped_empty;
}

}  // namespace

std::size_t Verse::char_length() const {
  std::size_t n = 0;
  for (const auto& line : lines) n += utf8_length(line);
  return n;
}

std::size_t Corpus::verse_count() const {
  std::size_t n = 0;
  for (const auto& s : songs) n += s.verses.size();
  return n;
}

std::vector<std::string> Corpus::all_lines() const {
  std::vector<std::string> out;
  for (const auto& s : songs) {
    for (const auto& v : s.verses) out.insert(out.end(), v.lines.begin(), v.lines.end());
  }
  return out;
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++record;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), record);
    }
    if (!rec.is_object()) throw ParseError("record must be a JSON object", record);
    Song song;
    song.id = require_string(rec, "id", record);
    if (song.id.empty()) throw ParseError("empty `id`", record);
    song.artist = require_string(rec, "artist", record);
    song.title = require_string(rec, "title", record);
    if (const auto it = rec.find("language_tag"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError("`language_tag` must be a string", record);
      song.language_tag = it->get<std::string>();
    }
    const auto verses = rec.find("verses");
    if (verses == rec.end()) throw ParseError("missing `verses` field", record);
    if (!verses->is_array()) throw ParseError("`verses` must be an array", record);
    for (const auto& v : *verses) song.verses.push_back(parse_verse(v, record));
    if (!ids.insert(song.id).second) throw ParseError("duplicate song id '" + song.id + "'", record);
    corpus.songs.push_back(std::move(song));
  }
  if (corpus.songs.empty()) throw EmptyCorpus("corpus has no records");
  return corpus;
}

Corpus ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus: " + path.string());
  return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& song : corpus.songs) {
    json rec = json::object();
    rec["id"] = song.id;
    rec["artist"] = song.artist;
    rec["title"] = song.title;
    if (song.language_tag) rec["language_tag"] = *song.language_tag;
    json verses = json::array();
    for (const auto& v : song.verses) verses.push_back(v.lines);
    rec["verses"] = std::move(verses);
    out << rec.dump() << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus: " + path.string());
  write_corpus(corpus, out);
}

Verse dedup_consecutive(const Verse& verse, double threshold) {
  Verse out;
  for (const auto& line : verse.lines) {
    if (!out.lines.empty() && gestalt_similarity(out.lines.back(), line) > threshold) continue;
    out.lines.push_back(line);
  }
  return out;
}

Corpus filter_verses(const Corpus& corpus, const FilterRules& rules, PreprocessStats* stats) {
  Corpus out;
  for (const auto& song : corpus.songs) {
    Song kept = song;
    kept.verses.clear();
    for (const auto& verse : song.verses) {
      if (verse.lines.size() < rules.min_verse_lines) {
        if (stats) ++stats->verses_dropped_line_count;
      } else if (verse.char_length() < rules.min_verse_chars) {
        if (stats) ++stats->verses_dropped_char_count;
      } else {
        kept.verses.push_back(verse);
      }
    }
    if (kept.verses.empty()) {
      if (stats) ++stats->songs_dropped_empty;
      continue;
    }
    out.songs.push_back(std::move(kept));
  }
  return out;
}

StopwordList StopwordList::builtin() {
  StopwordList list;
  for (auto& w : split_whitespace(kBuiltinStopwords)) list.words_.insert(std::move(w));
  return list;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword list: " + path.string());
  StopwordList list;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = normalize_token(line);
    if (!w.empty()) list.words_.insert(std::move(w));
  }
  return list;
}

bool is_english_tag(std::string_view tag) {
  const std::string t = to_lower_ascii(trim(tag));
  return t == "en" || t == "eng" || t == "english" || t.rfind("en-", 0) == 0 ||
         t.rfind("en_", 0) == 0;
}

double stopword_ratio(const Song& song, const StopwordList& stopwords) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& verse : song.verses) {
    for (const auto& line : verse.lines) {
      for (const auto& tok : tokenize_line(line)) {
        ++total;
        if (stopwords.contains(tok)) ++hits;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

Corpus filter_language(const Corpus& corpus, const StopwordList& stopwords, double floor,
                       PreprocessStats* stats) {
  Corpus out;
  for (const auto& song : corpus.songs) {
    const bool keep = song.language_tag ? is_english_tag(*song.language_tag)
                                        : stopword_ratio(song, stopwords) > floor;
    if (keep) {
      out.songs.push_back(song);
    } else if (stats) {
      ++stats->songs_dropped_language;
    }
  }
  return out;
}

Corpus preprocess(const Corpus& corpus, const FilterRules& rules, const StopwordList& stopwords,
                  PreprocessStats* stats, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.songs.size());
  std::vector<SongResult> results(corpus.songs.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      results[i] = preprocess_song(corpus.songs[i], rules, stopwords);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      results[i] = preprocess_song(corpus.songs[i], rules, stopwords);
    }
  }

  Corpus out;
  PreprocessStats total;
  total.songs_in = corpus.songs.size();
  total.verses_in = corpus.verse_count();
  for (auto& r : results) {
    accumulate(total, r.stats);
    if (r.song) out.songs.push_back(*std::move(r.song));
  }
  total.songs_out = out.songs.size();
  total.verses_out = out.verse_count();
  if (stats) *stats = total;
  return out;
}

CorpusSplit split_by_song(const Corpus& corpus, const SplitConfig& cfg, const Corpus* replacements) {
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw InvalidRequest("test_fraction must lie in (0, 1)");
  }
  std::vector<Song> pool;
  std::unordered_set<std::string> ids;
  for (const auto& song : corpus.songs) {
    if (cfg.deny_artists.count(song.artist)) continue;
    pool.push_back(song);
    ids.insert(song.id);
  }
  if (replacements != nullptr) {
    for (const auto& song : replacements->songs) {
      if (!cfg.allow_artists.count(song.artist) || cfg.deny_artists.count(song.artist)) continue;
      if (!ids.insert(song.id).second) continue;
      pool.push_back(song);
    }
  }
  if (pool.empty()) throw EmptyCorpus("no songs left to split");

  // Sort first so the partition does not depend on input order.
  std::sort(pool.begin(), pool.end(), [](const Song& a, const Song& b) { return a.id < b.id; });
  Rng rng(mix_seed(cfg.seed, "split"));
  rng.shuffle(pool);

  const std::size_t n = pool.size();
  auto n_test = static_cast<std::size_t>(std::floor(cfg.test_fraction * static_cast<double>(n) + 0.5));
  if (n >= 2) n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  else n_test = 0;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_test ? split.test : split.train).songs.push_back(std::move(pool[i]));
  }
  const auto by_id = [](const Song& a, const Song& b) { return a.id < b.id; };
  std::sort(split.train.songs.begin(), split.train.songs.end(), by_id);
  std::sort(split.test.songs.begin(), split.test.songs.end(), by_id);
  return split;
}

}  // namespace linesmith
