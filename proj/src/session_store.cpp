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

#include "linesmith/session_store.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "linesmith/error.hpp"
#include "linesmith/text.hpp"

namespace linesmith {

namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

nlohmann::json settings_json(const SessionSettings& s) {
  nlohmann::json j;
  j["syllable_target"] = s.syllable_target ? nlohmann::json(*s.syllable_target) : nlohmann::json();
  j["k"] = s.k;
  return j;
}

SessionSettings settings_from(const nlohmann::json& j) {
  SessionSettings s;
  if (j.contains("syllable_target") && !j["syllable_target"].is_null()) {
    s.syllable_target = j["syllable_target"].get<int>();
  }
  if (j.contains("k")) s.k = j["k"].get<std::size_t>();
  return s;
}

}  // namespace

nlohmann::ordered_json Session::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["accepted_lines"] = accepted_lines;
  j["created_ms"] = created_ms;
  j["updated_ms"] = updated_ms;
  j["settings"] = settings_json(settings);
  return j;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> log_path)
    : log_path_(std::move(log_path)), ids_(std::random_device{}()) {
  if (!log_path_) return;
  std::optional<std::uintmax_t> keep_bytes;
  bool needs_newline = false;
  if (std::ifstream in(*log_path_, std::ios::binary); in) {
    std::string line;
    std::size_t lineno = 0;
    std::streamoff start = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const bool last = in.eof();
      if (!trim(line).empty()) {
        try {
          apply(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
          // A torn final record from an interrupted write is dropped.
          if (!last) {
            throw ParseError(log_path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
          }
          keep_bytes = static_cast<std::uintmax_t>(start);
          break;
        }
      }
      needs_newline = last && !line.empty();
      if (!last) start = in.tellg();
    }
  }
  if (keep_bytes) std::filesystem::resize_file(*log_path_, *keep_bytes);
  if (log_path_->has_parent_path()) std::filesystem::create_directories(log_path_->parent_path());
  log_.open(*log_path_, std::ios::app);
  if (!log_) throw IoError("cannot open session log " + log_path_->string());
  if (needs_newline) log_ << '\n' << std::flush;
}

void SessionStore::apply(const nlohmann::json& record) {
  const std::string op = record.at("op").get<std::string>();
  const std::string id = record.at("id").get<std::string>();
  const std::int64_t ts = record.at("ts").get<std::int64_t>();
  if (op == "create") {
    Session s;
    s.id = id;
    s.created_ms = s.updated_ms = ts;
    s.settings = settings_from(record.value("settings", nlohmann::json::object()));
    sessions_[id] = std::move(s);
  } else if (op == "accept") {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession(id);
    it->second.accepted_lines.push_back(record.at("line").get<std::string>());
    it->second.updated_ms = ts;
  } else {
    throw ParseError("unknown session log op: " + op);
  }
}

void SessionStore::append(const nlohmann::json& record) {
  if (!log_.is_open()) return;
  log_ << record.dump() << '\n';
  log_.flush();
  if (!log_) throw IoError("cannot write session log " + log_path_->string());
}

Session SessionStore::create(const SessionSettings& settings) {
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    char buf[20];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(ids_.next()));
    id = buf;
  } while (sessions_.count(id));
  const nlohmann::json record = {
      {"op", "create"}, {"id", id}, {"ts", now_ms()}, {"settings", settings_json(settings)}};
  append(record);
  apply(record);
  return sessions_.at(id);
}

std::optional<Session> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

Session SessionStore::accept(const std::string& id, const std::string& line) {
  std::lock_guard lock(mutex_);
  if (!sessions_.count(id)) throw UnknownSession(id);
  const nlohmann::json record = {{"op", "accept"}, {"id", id}, {"ts", now_ms()}, {"line", line}};
  append(record);
  apply(record);
  return sessions_.at(id);
}

void SessionStore::flush() {
  std::lock_guard lock(mutex_);
  if (log_.is_open()) log_.flush();
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace linesmith
