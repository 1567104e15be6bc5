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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "linesmith/rng.hpp"

namespace linesmith {

struct SessionSettings {
  std::optional<int> syllable_target;  // empty means derived from the input
  std::size_t k = 5;
  bool operator==(const SessionSettings&) const = default;
};

struct Session {
  std::string id;
  std::vector<std::string> accepted_lines;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
  SessionSettings settings;

  nlohmann::ordered_json to_json() const;
  bool operator==(const Session&) const = default;
};

/// Sessions kept in memory and mirrored to an append-only JSONL log, one
/// record per mutation, replayed on construction. Without a log path the
/// store is memory-only.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> log_path = std::nullopt);

  Session create(const SessionSettings& settings = {});
  std::optional<Session> get(const std::string& id) const;
  /// Throws UnknownSession.
  Session accept(const std::string& id, const std::string& line);

  void flush();
  std::size_t size() const;
  const std::optional<std::filesystem::path>& log_path() const { return log_path_; }

 private:
  void apply(const nlohmann::json& record);
  void append(const nlohmann::json& record);

  std::optional<std::filesystem::path> log_path_;
  std::ofstream log_;
  mutable std::mutex mutex_;
  std::map<std::string, Session> sessions_;
  Rng ids_;
};

}  // namespace linesmith
