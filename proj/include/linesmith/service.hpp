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

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "linesmith/backend.hpp"
#include "linesmith/generation.hpp"
#include "linesmith/rhyme.hpp"
#include "linesmith/session_store.hpp"

namespace httplib {
class Server;
}

namespace linesmith {

/// Reads a SuggestionRequest from a JSON body. Throws InvalidRequest.
SuggestionRequest suggestion_request_from_json(const nlohmann::json& body);
nlohmann::ordered_json to_json(const ConstraintReport& report);
nlohmann::ordered_json to_json(const SuggestionSet& set);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "*";
  std::uint64_t seed = 0;
  SuggestOptions suggest;
};

/// JSON-over-HTTP facade: /suggest, /rhymes, /sessions, /health.
class Service {
 public:
  Service(std::shared_ptr<const RhymeDictionary> dictionary,
          std::shared_ptr<GenerationBackend> backend, std::shared_ptr<SessionStore> sessions,
          ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const { return port_; }

  nlohmann::ordered_json health();
  SessionStore& sessions() { return *sessions_; }

 private:
  void routes();
  int bind();

  std::shared_ptr<const RhymeDictionary> dictionary_;
  std::shared_ptr<GenerationBackend> backend_;
  std::shared_ptr<SessionStore> sessions_;
  ServiceConfig config_;
  Suggester suggester_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<int> port_{0};
};

}  // namespace linesmith
