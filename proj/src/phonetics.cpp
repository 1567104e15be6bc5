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

#include "linesmith/phonetics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

constexpr std::string_view kPrimary = "ˈ";
constexpr std::string_view kSecondary = "ˌ";

constexpr std::u32string_view kVowelBases =
    U"iyɨʉɯuɪʏʊeøɘɵɤoəɛœɜɞʌɔæɐaɶɑɒɝɚ";

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string shell_quote(const std::string& word) {
  std::string out = "'";
  for (char c : word) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

struct GraphemeRule {
  std::string_view letters;
  std::string_view phonemes;  // space-separated
};

// Longest match first within each table.
constexpr std::array<GraphemeRule, 10> kVowelGroups{{
    {"ee", "i"}, {"ea", "i"}, {"oo", "u"}, {"ai", "eɪ"}, {"ay", "eɪ"},
    {"oa", "oʊ"}, {"oi", "ɔɪ"}, {"oy", "ɔɪ"}, {"au", "ɔ"}, {"ie", "i"},
}};

constexpr std::array<GraphemeRule, 6> kConsonantDigraphs{{
    {"ch", "tʃ"}, {"sh", "ʃ"}, {"th", "θ"}, {"ng", "ŋ"}, {"ph", "f"}, {"ck", "k"},
}};

std::string_view single_vowel(char c) {
  switch (c) {
    case 'a': return "æ";
    case 'e': return "ɛ";
    case 'i': return "ɪ";
    case 'o': return "ɑ";
    case 'u': return "ʌ";
    default: return "i";  // y
  }
}

std::string_view single_consonant(char c) {
  switch (c) {
    case 'c': case 'k': case 'q': return "k";
    case 'g': return "ɡ";
    case 'j': return "dʒ";
    case 'r': return "ɹ";
    case 'x': return "k s";
    default: return {};
  }
}

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

void append_symbols(std::vector<std::string>& out, std::string_view symbols) {
  for (auto& s : split_whitespace(symbols)) out.push_back(std::move(s));
}

}  // namespace

std::string_view to_string(PhonemeSource source) {
  switch (source) {
    case PhonemeSource::Engine: return "engine";
    case PhonemeSource::Dictionary: return "dictionary";
    case PhonemeSource::Fallback: return "fallback";
  }
  return "unknown";
}

bool is_vowel(std::string_view phoneme) {
  if (starts_with(phoneme, kPrimary)) phoneme.remove_prefix(kPrimary.size());
  if (starts_with(phoneme, kSecondary)) phoneme.remove_prefix(kSecondary.size());
  const std::u32string cps = utf8_decode(phoneme);
  if (cps.empty()) return false;
  for (char32_t c : cps) {
    if (c == 0x0329) return true;  // syllabic consonant
  }
  return kVowelBases.find(cps.front()) != std::u32string_view::npos;
}

std::vector<std::size_t> PhonemeSequence::stress_indices() const {
  std::vector<std::size_t> out;
  out.reserve(stress.size());
  for (const auto& mark : stress) out.push_back(mark.index);
  return out;
}

std::vector<std::size_t> PhonemeSequence::nucleus_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    if (is_vowel(phonemes[i])) out.push_back(i);
  }
  return out;
}

std::size_t PhonemeSequence::nucleus_count() const { return nucleus_indices().size(); }

std::string PhonemeSequence::to_ipa() const {
  std::string out;
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    if (i) out.push_back(' ');
    for (const auto& mark : stress) {
      if (mark.index == i) out += mark.primary ? kPrimary : kSecondary;
    }
    out += phonemes[i];
  }
  return out;
}

PhonemeSequence parse_pronunciation(std::string_view ipa, PhonemeSource source) {
  PhonemeSequence seq;
  seq.source = source;
  for (auto token : split_whitespace(ipa)) {
    std::optional<bool> primary;
    std::string_view sym = token;
    if (starts_with(sym, kPrimary)) {
      primary = true;
      sym.remove_prefix(kPrimary.size());
    } else if (starts_with(sym, kSecondary)) {
      primary = false;
      sym.remove_prefix(kSecondary.size());
    }
    if (sym.empty()) throw ParseError("dangling stress mark in '" + std::string(ipa) + "'");
    if (primary) {
      if (!is_vowel(sym)) {
        throw ParseError("stress mark on non-vowel '" + std::string(sym) + "'");
      }
      seq.stress.push_back({seq.phonemes.size(), *primary});
    }
    seq.phonemes.emplace_back(sym);
  }
  if (seq.stress.empty()) {
    const auto nuclei = seq.nucleus_indices();
    if (!nuclei.empty()) seq.stress.push_back({nuclei.back(), true});
  }
  return seq;
}

PhonemeSequence orthographic_fallback(std::string_view word) {
  const std::string w = to_lower_ascii(word);
  std::vector<std::string> phonemes;

  // Index of the vowel group that is a silent final `e`, if any.
  std::size_t groups = 0;
  for (std::size_t i = 0; i < w.size();) {
    if (is_vowel_letter(w[i])) {
      ++groups;
      while (i < w.size() && is_vowel_letter(w[i])) ++i;
    } else {
      ++i;
    }
  }
  const bool silent_e = groups > 1 && w.size() >= 2 && w.back() == 'e' &&
                        !is_vowel_letter(w[w.size() - 2]);

  for (std::size_t i = 0; i < w.size();) {
    const char c = w[i];
    if (is_vowel_letter(c)) {
      std::size_t j = i;
      while (j < w.size() && is_vowel_letter(w[j])) ++j;
      if (silent_e && j == w.size() && j - i == 1) break;
      std::string_view group(w.data() + i, j - i);
      std::string_view sym = single_vowel(group.front());
      for (const auto& rule : kVowelGroups) {
        if (starts_with(group, rule.letters)) {
          sym = rule.phonemes;
          break;
        }
      }
      phonemes.emplace_back(sym);
      i = j;
      continue;
    }
    if (c == '\'' || c == '-') {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& rule : kConsonantDigraphs) {
      if (starts_with(std::string_view(w).substr(i), rule.letters)) {
        append_symbols(phonemes, rule.phonemes);
        i += rule.letters.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const auto mapped = single_consonant(c);
    if (!mapped.empty()) {
      append_symbols(phonemes, mapped);
      ++i;
      continue;
    }
    // Plain ASCII consonants map to themselves; other bytes are carried
    // through as whole UTF-8 code points.
    std::size_t len = 1;
    const auto b = static_cast<unsigned char>(c);
    if (b >= 0xF0) {
      len = 4;
    } else if (b >= 0xE0) {
      len = 3;
    } else if (b >= 0xC0) {
      len = 2;
    }
    phonemes.emplace_back(w.substr(i, len));
    i += len;
  }

  PhonemeSequence seq;
  seq.source = PhonemeSource::Fallback;
  seq.phonemes = std::move(phonemes);
  auto nuclei = seq.nucleus_indices();
  if (nuclei.empty()) {
    const std::size_t at = seq.phonemes.empty() ? 0 : seq.phonemes.size() - 1;
    seq.phonemes.insert(seq.phonemes.begin() + static_cast<std::ptrdiff_t>(at), "ə");
    nuclei.push_back(at);
  }
  seq.stress.push_back({nuclei.back(), true});
  return seq;
}

PronouncingDictionary PronouncingDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pronouncing dictionary: " + path.string());
  return parse(in);
}

PronouncingDictionary PronouncingDictionary::parse(std::istream& in) {
  PronouncingDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw ParseError("expected word<TAB>phonemes", line_no);
    }
    dict.entries_.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return dict;
}

std::optional<PhonemeSequence> PronouncingDictionary::lookup(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return std::nullopt;
  return parse_pronunciation(it->second, PhonemeSource::Dictionary);
}

bool PronouncingDictionary::contains(std::string_view word) const {
  return entries_.count(std::string(word)) > 0;
}

void PronouncingDictionary::insert(std::string word, std::string ipa) {
  entries_.insert_or_assign(std::move(word), std::move(ipa));
}

SubprocessEngine::SubprocessEngine(std::string command_template)
    : template_(std::move(command_template)) {}

std::optional<std::string> SubprocessEngine::pronounce(const std::string& word) {
  std::string command = template_;
  const std::string quoted = shell_quote(word);
  for (auto pos = command.find("{word}"); pos != std::string::npos;
       pos = command.find("{word}", pos + quoted.size())) {
    command.replace(pos, 6, quoted);
  }
  std::lock_guard lock(mutex_);
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return std::nullopt;
  std::string output;
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
    output += buf.data();
    if (output.find('\n') != std::string::npos) break;
  }
  // Drain so the child never blocks on a full pipe.
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
  }
  const int status = ::pclose(pipe);
  if (status != 0) return std::nullopt;
  const auto nl = output.find('\n');
  std::string first(trim(output.substr(0, nl)));
  if (first.empty()) return std::nullopt;
  return first;
}

std::optional<PhonemeSequence> PhonemeCache::find(const std::string& word) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(word);
  if (it == entries_.end()) {
    misses_.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

PhonemeSequence PhonemeCache::store(const std::string& word, PhonemeSequence seq) {
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = entries_.emplace(word, std::move(seq));
  return it->second;
}

CacheStats PhonemeCache::stats() const {
  std::shared_lock lock(mutex_);
  return {entries_.size(), hits_.load(), misses_.load()};
}

Phonemizer::Phonemizer(std::shared_ptr<const PronouncingDictionary> dictionary,
                       std::shared_ptr<G2pEngine> engine, PhonemizerConfig config)
    : dictionary_(std::move(dictionary)),
      engine_(std::move(engine)),
      config_(config),
      cache_(std::make_unique<PhonemeCache>()) {}

std::optional<PhonemeSequence> Phonemizer::resolve_direct(const std::string& word) const {
  const auto from_engine = [&]() -> std::optional<PhonemeSequence> {
    if (!engine_) return std::nullopt;
    const auto ipa = engine_->pronounce(word);
    if (!ipa) return std::nullopt;
    try {
      auto seq = parse_pronunciation(*ipa, PhonemeSource::Engine);
      if (seq.phonemes.empty()) return std::nullopt;
      return seq;
    } catch (const ParseError&) {
      return std::nullopt;
    }
  };
  const auto from_dictionary = [&]() -> std::optional<PhonemeSequence> {
    if (!dictionary_) return std::nullopt;
    return dictionary_->lookup(word);
  };
  if (config_.engine_first) {
    if (auto seq = from_engine()) return seq;
    return from_dictionary();
  }
  if (auto seq = from_dictionary()) return seq;
  return from_engine();
}

std::optional<PhonemeSequence> Phonemizer::resolve(const std::string& word) const {
  if (auto seq = resolve_direct(word)) return seq;

  // Hyphenated compounds resolve part by part.
  if (word.find('-') != std::string::npos) {
    PhonemeSequence joined;
    bool ok = true;
    bool any = false;
    std::stringstream parts(word);
    std::string part;
    while (std::getline(parts, part, '-')) {
      if (part.empty()) continue;
      auto seq = resolve_direct(part);
      if (!seq) {
        ok = false;
        break;
      }
      for (auto mark : seq->stress) {
        mark.index += joined.phonemes.size();
        joined.stress.push_back(mark);
      }
      joined.phonemes.insert(joined.phonemes.end(), seq->phonemes.begin(), seq->phonemes.end());
      if (seq->source == PhonemeSource::Engine) joined.source = PhonemeSource::Engine;
      any = true;
    }
    if (ok && any) return joined;
  }

  const bool has_letter = std::any_of(word.begin(), word.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
  });
  if (config_.fallback_enabled && has_letter) return orthographic_fallback(word);
  return std::nullopt;
}

PhonemeSequence Phonemizer::phonemize(std::string_view word) const {
  const std::string w = normalize_token(word);
  if (w.empty()) throw UnresolvableWord("empty word after normalization: '" + std::string(word) + "'");
  if (config_.cache_enabled) {
    if (auto hit = cache_->find(w)) return *std::move(hit);
  }
  auto seq = resolve(w);
  if (!seq) throw UnresolvableWord("cannot phonemize '" + w + "'");
  if (config_.cache_enabled) return cache_->store(w, *std::move(seq));
  return *std::move(seq);
}

std::optional<PhonemeSequence> Phonemizer::try_phonemize(std::string_view word) const {
  try {
    return phonemize(word);
  } catch (const UnresolvableWord&) {
    return std::nullopt;
  }
}

std::size_t Phonemizer::syllables(std::string_view word) const {
  if (normalize_token(word).empty()) return 0;
  const auto seq = try_phonemize(word);
  return seq ? seq->nucleus_count() : 0;
}

std::size_t Phonemizer::line_syllables(std::string_view line) const {
  std::size_t total = 0;
  for (const auto& token : tokenize_line(line)) total += syllables(token);
  return total;
}

}  // namespace linesmith
