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

#include "linesmith/rhyme.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

constexpr std::string_view kBuiltinTable = R"(version 1

[vowel_classes]
ɪ ə
ɑ ɔ
ʊ u
ɝ ɚ

[consonant_pairs]
s z
t d
f v
ŋ n
θ ð
ʃ ʒ
tʃ dʒ

[deletable_codas]
t
d
s
z

[options]
ignore_internal_consonants
)";

enum class Section { None, Vowels, Consonants, Codas, Options };

}  // namespace

std::string_view to_string(RhymeClass c) {
  switch (c) {
    case RhymeClass::Perfect: return "perfect";
    case RhymeClass::Near: return "near";
    case RhymeClass::None: return "none";
  }
  return "none";
}

RhymeKey rhyme_key(const PhonemeSequence& seq) {
  std::optional<std::size_t> anchor;
  for (const auto& mark : seq.stress) {
    if (mark.primary && (!anchor || mark.index > *anchor)) anchor = mark.index;
  }
  if (!anchor) {
    for (const auto& mark : seq.stress) {
      if (!anchor || mark.index > *anchor) anchor = mark.index;
    }
  }
  if (!anchor) {
    const auto nuclei = seq.nucleus_indices();
    if (!nuclei.empty()) anchor = nuclei.back();
  }
  if (!anchor || *anchor >= seq.phonemes.size() || !is_vowel(seq.phonemes[*anchor])) {
    throw NoNucleus("no vowel nucleus in '" + seq.to_ipa() + "'");
  }
  RhymeKey key;
  key.suffix.assign(seq.phonemes.begin() + static_cast<std::ptrdiff_t>(*anchor),
                    seq.phonemes.end());
  return key;
}

EquivalenceTable EquivalenceTable::parse(std::istream& in) {
  EquivalenceTable table;
  Section section = Section::None;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string_view line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[vowel_classes]") {
        section = Section::Vowels;
      } else if (line == "[consonant_pairs]") {
        section = Section::Consonants;
      } else if (line == "[deletable_codas]") {
        section = Section::Codas;
      } else if (line == "[options]") {
        section = Section::Options;
      } else {
        throw ParseError("unknown section " + std::string(line), line_no);
      }
      continue;
    }
    const auto tokens = split_whitespace(line);
    switch (section) {
      case Section::None:
        if (tokens.size() == 2 && tokens[0] == "version" &&
            tokens[1].find_first_not_of("0123456789") == std::string::npos && tokens[1].size() < 9) {
          table.version_ = std::stoi(tokens[1]);
        } else {
          throw ParseError("expected 'version N' before the first section", line_no);
        }
        break;
      case Section::Vowels:
        for (const auto& t : tokens) {
          if (!is_vowel(t)) throw ParseError("'" + t + "' is not a vowel", line_no);
        }
        table.add_class(tokens);
        break;
      case Section::Consonants:
        for (const auto& t : tokens) {
          if (is_vowel(t)) throw ParseError("'" + t + "' is a vowel", line_no);
        }
        table.add_class(tokens);
        break;
      case Section::Codas:
        if (tokens.size() != 1 || is_vowel(tokens[0])) {
          throw ParseError("expected one consonant per line", line_no);
        }
        table.add_deletable(tokens[0]);
        break;
      case Section::Options:
        if (tokens.size() == 1 && tokens[0] == "ignore_internal_consonants") {
          table.ignore_internal_consonants_ = true;
        } else {
          throw ParseError("unknown option '" + std::string(line) + "'", line_no);
        }
        break;
    }
  }
  return table;
}

EquivalenceTable EquivalenceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open equivalence table: " + path.string());
  return parse(in);
}

EquivalenceTable EquivalenceTable::builtin() {
  std::istringstream in{std::string(kBuiltinTable)};
  return parse(in);
}

std::string EquivalenceTable::representative(const std::string& phoneme) const {
  const auto it = representative_.find(phoneme);
  return it == representative_.end() ? phoneme : it->second;
}

bool EquivalenceTable::deletable(const std::string& rep) const {
  return std::any_of(deletable_.begin(), deletable_.end(),
                     [&](const std::string& d) { return representative(d) == rep; });
}

std::set<std::string> EquivalenceTable::deletable_representatives() const {
  std::set<std::string> out;
  for (const auto& d : deletable_) out.insert(representative(d));
  return out;
}

void EquivalenceTable::add_class(const std::vector<std::string>& members) {
  if (members.empty()) return;
  // Merging into an existing class keeps that class's representative.
  std::string rep = members.front();
  for (const auto& m : members) {
    const auto it = representative_.find(m);
    if (it != representative_.end()) {
      rep = it->second;
      break;
    }
  }
  std::set<std::string> absorbed;
  for (const auto& m : members) {
    const auto it = representative_.find(m);
    if (it != representative_.end() && it->second != rep) absorbed.insert(it->second);
  }
  for (auto& [phoneme, r] : representative_) {
    if (absorbed.count(r)) r = rep;
  }
  for (const auto& m : members) representative_[m] = rep;
  representative_[rep] = rep;
}

void EquivalenceTable::add_deletable(const std::string& phoneme) { deletable_.insert(phoneme); }

std::vector<std::string> EquivalenceTable::canonical(const RhymeKey& key) const {
  std::vector<std::string> mapped;
  mapped.reserve(key.suffix.size());
  for (const auto& p : key.suffix) mapped.push_back(representative(p));
  if (!ignore_internal_consonants_) return mapped;

  std::size_t last_vowel = 0;
  for (std::size_t i = 0; i < key.suffix.size(); ++i) {
    if (is_vowel(key.suffix[i])) last_vowel = i;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    if (i > last_vowel || is_vowel(key.suffix[i])) out.push_back(mapped[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> EquivalenceTable::variants(
    const std::vector<std::string>& canonical) const {
  std::vector<std::vector<std::string>> out{canonical};
  if (canonical.size() >= 2 && !is_vowel(canonical.back()) && deletable(canonical.back())) {
    std::vector<std::string> shorter(canonical.begin(), canonical.end() - 1);
    if (std::any_of(shorter.begin(), shorter.end(), [](const auto& p) { return is_vowel(p); })) {
      out.push_back(std::move(shorter));
    }
  }
  return out;
}

std::string join_key(const std::vector<std::string>& phonemes) {
  std::string out;
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    if (i) out.push_back(' ');
    out += phonemes[i];
  }
  return out;
}

RhymeClassifier::RhymeClassifier(std::shared_ptr<const Phonemizer> phonemizer,
                                 EquivalenceTable table)
    : phonemizer_(std::move(phonemizer)), table_(std::move(table)) {}

RhymeClass RhymeClassifier::classify_keys(const RhymeKey& a, const RhymeKey& b) const {
  if (a == b) return RhymeClass::Perfect;
  const auto va = table_.variants(table_.canonical(a));
  const auto vb = table_.variants(table_.canonical(b));
  for (const auto& x : va) {
    for (const auto& y : vb) {
      if (x == y) return RhymeClass::Near;
    }
  }
  return RhymeClass::None;
}

RhymeKey RhymeClassifier::key_of(std::string_view word) const {
  return rhyme_key(phonemizer_->phonemize(word));
}

std::optional<RhymeKey> RhymeClassifier::try_key_of(std::string_view word) const {
  try {
    return key_of(word);
  } catch (const UnresolvableWord&) {
    return std::nullopt;
  } catch (const NoNucleus&) {
    return std::nullopt;
  }
}

RhymeClass RhymeClassifier::classify(std::string_view a, std::string_view b) const {
  return classify_keys(key_of(a), key_of(b));
}

RhymeClass RhymeClassifier::classify_or_none(std::string_view a, std::string_view b) const {
  const auto ka = try_key_of(a);
  const auto kb = try_key_of(b);
  if (!ka || !kb) return RhymeClass::None;
  return classify_keys(*ka, *kb);
}

std::string RhymeClassifier::bucket_of(const RhymeKey& key) const {
  return join_key(table_.canonical(key));
}

RhymeDictionary::RhymeDictionary(std::shared_ptr<const RhymeClassifier> classifier)
    : classifier_(std::move(classifier)) {}

RhymeDictionary RhymeDictionary::build(std::shared_ptr<const RhymeClassifier> classifier,
                                       const std::vector<std::string>& lines, Execution exec) {
  RhymeDictionary dict(std::move(classifier));
  std::map<std::string, std::uint64_t> counts;
  for (const auto& line : lines) {
    for (auto& token : tokenize_line(line)) ++counts[std::move(token)];
  }
  std::vector<std::string> words;
  words.reserve(counts.size());
  for (const auto& [w, _] : counts) words.push_back(w);

  std::vector<std::optional<RhymeKey>> keys(words.size());
  const auto n = static_cast<std::ptrdiff_t>(words.size());
  const RhymeClassifier& cls = *dict.classifier_;
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) keys[i] = cls.try_key_of(words[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) keys[i] = cls.try_key_of(words[i]);
  }

  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!keys[i]) {
      ++dict.skipped_;
      continue;
    }
    const std::string bucket = cls.bucket_of(*keys[i]);
    dict.buckets_[bucket][words[i]] += counts[words[i]];
    dict.word_bucket_[words[i]] = bucket;
    dict.word_key_[words[i]] = *std::move(keys[i]);
  }
  return dict;
}

bool RhymeDictionary::add(std::string_view word, std::uint64_t frequency) {
  const std::string w = normalize_token(word);
  const auto key = classifier_->try_key_of(w);
  if (w.empty() || !key) {
    ++skipped_;
    return false;
  }
  const std::string bucket = classifier_->bucket_of(*key);
  buckets_[bucket][w] += frequency;
  word_bucket_[w] = bucket;
  word_key_[w] = *key;
  return true;
}

std::vector<RankedWord> RhymeDictionary::rhymes_of(std::string_view word) const {
  const std::string w = normalize_token(word);
  const auto key = w.empty() ? std::nullopt : classifier_->try_key_of(w);
  if (!key) throw UnknownWord("cannot find rhymes for '" + std::string(word) + "'");

  const auto& table = classifier_->table();
  const auto deletables = table.deletable_representatives();
  std::set<std::string> candidate_buckets;
  for (const auto& v : table.variants(table.canonical(*key))) {
    candidate_buckets.insert(join_key(v));
    for (const auto& d : deletables) {
      auto longer = v;
      longer.push_back(d);
      candidate_buckets.insert(join_key(longer));
    }
  }

  std::vector<RankedWord> out;
  for (const auto& b : candidate_buckets) {
    const auto it = buckets_.find(b);
    if (it == buckets_.end()) continue;
    for (const auto& [candidate, freq] : it->second) {
      if (candidate == w) continue;
      if (classifier_->classify_keys(*key, word_key_.at(candidate)) == RhymeClass::None) continue;
      out.push_back({candidate, freq});
    }
  }
  std::sort(out.begin(), out.end(), [](const RankedWord& a, const RankedWord& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.word < b.word;
  });
  return out;
}

std::vector<RankedWord> RhymeDictionary::top_rhymes(std::string_view word, std::size_t k) const {
  auto all = rhymes_of(word);
  if (all.size() > k) all.resize(k);
  return all;
}

std::uint64_t RhymeDictionary::frequency(std::string_view word) const {
  const std::string w = normalize_token(word);
  const auto it = word_bucket_.find(w);
  if (it == word_bucket_.end()) return 0;
  return buckets_.at(it->second).at(w);
}

std::optional<std::string> RhymeDictionary::bucket_of_word(std::string_view word) const {
  const auto it = word_bucket_.find(normalize_token(word));
  if (it == word_bucket_.end()) return std::nullopt;
  return it->second;
}

}  // namespace linesmith
