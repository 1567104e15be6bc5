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

#include "linesmith/backend.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw InvalidRequest("remote endpoint must be an http:// URL");
  const auto slash = url.find('/', scheme.size());
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string choose_weighted(const std::vector<RankedWord>& words, Rng& rng) {
  std::uint64_t total = 0;
  for (const auto& w : words) total += w.frequency;
  if (total == 0) return words[rng.uniform(words.size())].word;
  std::uint64_t r = rng.uniform(total);
  for (const auto& w : words) {
    if (r < w.frequency) return w.word;
    r -= w.frequency;
  }
  return words.back().word;
}

std::string pick_rhyming_end_word(const std::vector<std::string>& anchors, const NgramModel& model,
                                  const RhymeDictionary& dictionary, Rng& rng) {
  const std::string& anchor = anchors[rng.uniform(anchors.size())];
  std::vector<RankedWord> candidates;
  try {
    for (auto& w : dictionary.rhymes_of(anchor)) {
      if (model.knows(w.word)) candidates.push_back(std::move(w));
    }
  } catch (const UnknownWord&) {
  }
  if (candidates.empty()) return anchor;
  return choose_weighted(candidates, rng);
}

}  // namespace

std::string ngram_generate(const NgramModel& model, const TrainingExample& query,
                           const RhymeDictionary& dictionary, Rng& rng, std::size_t max_words) {
  const Phonemizer& phonemizer = dictionary.classifier().phonemizer();
  std::optional<std::string> end_word;
  switch (query.task) {
    case Task::Ending:
      if (query.ending_word_tag) end_word = normalize_token(*query.ending_word_tag);
      break;
    case Task::Rhyme: {
      std::vector<std::string> anchors;
      for (std::size_t i = 0; i < query.input_lines.size(); ++i) {
        if (i < query.rhyme_flags.size() && query.rhyme_flags[i]) {
          std::string w = final_word(query.input_lines[i]);
          if (!w.empty()) anchors.push_back(std::move(w));
        }
      }
      if (anchors.empty() && !query.input_lines.empty()) {
        std::string w = final_word(query.input_lines.back());
        if (!w.empty()) anchors.push_back(std::move(w));
      }
      if (!anchors.empty()) end_word = pick_rhyming_end_word(anchors, model, dictionary, rng);
      break;
    }
    case Task::RhymeList:
      if (!query.rhyme_list_words.empty()) {
        return pick_rhyming_end_word(query.rhyme_list_words, model, dictionary, rng);
      }
      break;
    case Task::Control:
      break;
  }
  if (end_word && end_word->empty()) end_word.reset();

  const Direction dir = end_word ? Direction::Backward : Direction::Forward;
  const std::optional<int> target = query.syllable_tag;
  std::vector<std::string> tokens;
  std::size_t syllables = 0;
  if (end_word) {
    tokens.push_back(*end_word);
    syllables = phonemizer.syllables(*end_word);
  }
  while (tokens.size() < max_words) {
    if (target && syllables >= static_cast<std::size_t>(*target)) break;
    // The line may end once it is within one syllable of the tag.
    const bool allow_end = !target || syllables + 1 >= static_cast<std::size_t>(*target);
    std::string tok = model.sample_next(dir, tokens, rng, allow_end);
    if (tok.empty() || tok == kLineEnd || tok == kLineStart) break;
    syllables += phonemizer.syllables(tok);
    tokens.push_back(std::move(tok));
  }
  if (dir == Direction::Backward) std::reverse(tokens.begin(), tokens.end());
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

NgramBackend::NgramBackend(std::shared_ptr<const NgramModel> model,
                           std::shared_ptr<const RhymeDictionary> dictionary)
    : model_(std::move(model)), dictionary_(std::move(dictionary)) {}

std::vector<std::string> NgramBackend::generate(const std::string& rendered_input, std::size_t k,
                                                Rng& rng) {
  TrainingExample query;
  try {
    query = parse_input(rendered_input);
  } catch (const ParseError& e) {
    throw InvalidRequest(std::string("baseline cannot read query: ") + e.what());
  }
  std::vector<std::string> out;
  std::set<std::string> seen;
  // Distinct candidates when the model allows; bounded attempts otherwise.
  for (std::size_t attempt = 0; out.size() < k && attempt < 3 * k; ++attempt) {
    std::string line = ngram_generate(*model_, query, *dictionary_, rng);
    if (line.empty() || !seen.insert(line).second) continue;
    out.push_back(std::move(line));
  }
  return out;
}

std::string NgramBackend::id() const { return "ngram-" + std::to_string(model_->order()); }

EchoBackend::EchoBackend(const std::vector<TsvRow>& rows) {
  for (const auto& r : rows) targets_.emplace(r.input, r.target);
}

std::vector<std::string> EchoBackend::generate(const std::string& rendered_input, std::size_t k,
                                               Rng&) {
  const auto it = targets_.find(rendered_input);
  if (it == targets_.end() || k == 0 || it->second.empty()) return {};
  return {it->second};
}

std::vector<std::string> EchoBackend::generate_for(const TsvRow& row, std::size_t k, Rng&) {
  if (k == 0 || row.target.empty()) return {};
  return {row.target};
}

std::vector<std::string> remote_generate(const RemoteConfig& config,
                                         const std::string& rendered_input, std::size_t k) {
  const ParsedUrl url = parse_url(config.url);
  httplib::Client client(url.origin);
  const auto sec = config.timeout_ms / 1000;
  const auto usec = (config.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  httplib::Headers headers;
  if (config.auth_header) {
    const auto colon = config.auth_header->find(':');
    if (colon == std::string::npos) throw InvalidRequest("auth header must be 'Name: value'");
    headers.emplace(std::string(trim(config.auth_header->substr(0, colon))),
                    std::string(trim(config.auth_header->substr(colon + 1))));
  }
  const nlohmann::json body = {{"input", rendered_input}, {"num_candidates", k}};
  const auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("remote backend " + config.url + ": " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw BackendUnavailable("remote backend returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedResponse("remote backend returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw MalformedResponse("remote backend reply is not JSON");
  }
  if (!reply.is_object() || !reply.contains("candidates") || !reply["candidates"].is_array()) {
    throw MalformedResponse("remote backend reply lacks a `candidates` array");
  }
  std::vector<std::string> out;
  for (const auto& c : reply["candidates"]) {
    if (!c.is_string()) throw MalformedResponse("non-string candidate in remote reply");
    std::string line = sanitize_line(c.get<std::string>());
    if (!line.empty() && out.size() < k) out.push_back(std::move(line));
  }
  return out;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  parse_url(config_.url);
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::vector<std::string> RemoteBackend::generate(const std::string& rendered_input, std::size_t k,
                                                 Rng&) {
  {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    RemoteBackend* self;
    ~Release() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->slot_free_.notify_one();
    }
  } release{this};
  return remote_generate(config_, rendered_input, k);
}

bool RemoteBackend::reachable() {
  const ParsedUrl url = parse_url(config_.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::max(1, config_.timeout_ms / 1000), 0);
  client.set_read_timeout(std::max(1, config_.timeout_ms / 1000), 0);
  return static_cast<bool>(client.Get("/"));
}

}  // namespace linesmith
