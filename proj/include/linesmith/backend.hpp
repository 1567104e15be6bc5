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

#pragma once

#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "linesmith/dataset.hpp"
#include "linesmith/ngram.hpp"
#include "linesmith/rhyme.hpp"
#include "linesmith/rng.hpp"

namespace linesmith {

/// Anything that turns a rendered model input into candidate lines.
/// Implementations must tolerate concurrent calls.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;

  /// At most k non-empty candidate lines. Throws BackendUnavailable when
  /// the backend cannot be reached.
  virtual std::vector<std::string> generate(const std::string& rendered_input, std::size_t k,
                                            Rng& rng) = 0;
  /// Entry point used by evaluation. Oracle backends may read the target.
  virtual std::vector<std::string> generate_for(const TsvRow& row, std::size_t k, Rng& rng) {
    return generate(row.input, k, rng);
  }
  virtual std::string id() const = 0;
  virtual bool reachable() { return true; }
};

inline constexpr std::size_t kMaxGeneratedWords = 20;

/// One line from the n-gram model for a parsed query. Ending queries are
/// generated right-to-left from the ending word; rhyme queries first pick
/// an end word (frequency-weighted) among the rhymes of a [RHYME]-flagged
/// word, then go right-to-left; control queries go left-to-right. Lines stop
/// once they reach the syllable tag, or at `max_words`.
std::string ngram_generate(const NgramModel& model, const TrainingExample& query,
                           const RhymeDictionary& dictionary, Rng& rng,
                           std::size_t max_words = kMaxGeneratedWords);

class NgramBackend final : public GenerationBackend {
 public:
  NgramBackend(std::shared_ptr<const NgramModel> model,
               std::shared_ptr<const RhymeDictionary> dictionary);

  std::vector<std::string> generate(const std::string& rendered_input, std::size_t k,
                                    Rng& rng) override;
  std::string id() const override;

 private:
  std::shared_ptr<const NgramModel> model_;
  std::shared_ptr<const RhymeDictionary> dictionary_;
};

/// Returns the stored target for a known input: the oracle backend used to
/// check the metric harness.
class EchoBackend final : public GenerationBackend {
 public:
  explicit EchoBackend(const std::vector<TsvRow>& rows);
  /// The stored target for an input. Inputs repeated with different
  /// targets return the first one; generate_for is exact per row.
  std::vector<std::string> generate(const std::string& rendered_input, std::size_t k,
                                    Rng& rng) override;
  std::vector<std::string> generate_for(const TsvRow& row, std::size_t k, Rng& rng) override;
  std::string id() const override { return "echo"; }

 private:
  std::unordered_map<std::string, std::string> targets_;
};

struct RemoteConfig {
  std::string url;  // http://host:port/path
  int timeout_ms = 10000;
  std::optional<std::string> auth_header;  // "Name: value"
  std::size_t max_in_flight = 4;
};

/// POSTs {"input", "num_candidates"} and expects {"candidates": [text]}.
/// Connection failures, timeouts and 5xx become BackendUnavailable; any
/// other non-conforming reply is MalformedResponse.
std::vector<std::string> remote_generate(const RemoteConfig& config,
                                         const std::string& rendered_input, std::size_t k);

class RemoteBackend final : public GenerationBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::vector<std::string> generate(const std::string& rendered_input, std::size_t k,
                                    Rng& rng) override;
  std::string id() const override { return "remote:" + config_.url; }
  bool reachable() override;

 private:
  RemoteConfig config_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t in_flight_ = 0;
};

}  // namespace linesmith
