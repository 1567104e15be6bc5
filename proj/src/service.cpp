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

#include "linesmith/service.hpp"

#include <httplib.h>

#include "linesmith/error.hpp"
#include "linesmith/rng.hpp"

namespace linesmith {

namespace {

using Json = nlohmann::json;
using OJson = nlohmann::ordered_json;

void reply(httplib::Response& res, int status, const OJson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, OJson{{"error", message}});
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error&) {
    throw InvalidRequest("request body is not JSON");
  }
}

std::optional<std::string> optional_string(const Json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) throw InvalidRequest(std::string("`") + key + "` must be a string");
  return body[key].get<std::string>();
}

std::size_t parse_count(const std::string& text, const char* name) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::logic_error&) {
    pos = 0;
  }
  if (pos != text.size() || v < 1) throw InvalidRequest(std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

SuggestionRequest suggestion_request_from_json(const Json& body) {
  if (!body.is_object()) throw InvalidRequest("request body must be a JSON object");
  SuggestionRequest r;
  if (!body.contains("input_lines") || !body["input_lines"].is_array()) {
    throw InvalidRequest("`input_lines` must be an array of strings");
  }
  for (const auto& line : body["input_lines"]) {
    if (!line.is_string()) throw InvalidRequest("`input_lines` must be an array of strings");
    r.input_lines.push_back(line.get<std::string>());
  }
  if (body.contains("syllable_target") && !body["syllable_target"].is_null()) {
    if (!body["syllable_target"].is_number_integer()) {
      throw InvalidRequest("`syllable_target` must be an integer");
    }
    r.syllable_target = body["syllable_target"].get<int>();
  }
  r.ending_word = optional_string(body, "ending_word");
  if (body.contains("force_rhyme") && !body["force_rhyme"].is_null()) {
    if (!body["force_rhyme"].is_boolean()) throw InvalidRequest("`force_rhyme` must be a boolean");
    r.force_rhyme = body["force_rhyme"].get<bool>();
  }
  if (body.contains("k") && !body["k"].is_null()) {
    if (!body["k"].is_number_integer() || body["k"].get<long long>() < 1) {
      throw InvalidRequest("`k` must be a positive integer");
    }
    r.k = body["k"].get<std::size_t>();
  }
  r.validate();
  return r;
}

OJson to_json(const ConstraintReport& r) {
  OJson j;
  j["syllables"] = r.syllables;
  j["syllable_target"] = r.syllable_target;
  j["syllable_distance"] = r.syllable_distance;
  j["end_word"] = r.end_word;
  j["required_end_word"] = r.required_end_word ? OJson(*r.required_end_word) : OJson();
  j["end_word_match"] = r.end_word_match;
  j["rhyme_class"] = std::string(to_string(r.rhyme_class));
  j["rhymes_with"] = r.rhymes_with;
  return j;
}

OJson to_json(const SuggestionSet& set) {
  OJson j;
  OJson candidates = OJson::array();
  for (const auto& c : set.candidates) {
    candidates.push_back(
        {{"line", c.line}, {"query", c.query}, {"attempts", c.attempts}, {"report", to_json(c.report)}});
  }
  j["candidates"] = std::move(candidates);
  j["queries"] = set.queries;
  j["advisories"] = set.advisories;
  j["syllable_target"] = set.syllable_target;
  j["syllable_target_derived"] = set.syllable_target_derived;
  j["backend_calls"] = set.backend_calls;
  return j;
}

Service::Service(std::shared_ptr<const RhymeDictionary> dictionary,
                 std::shared_ptr<GenerationBackend> backend, std::shared_ptr<SessionStore> sessions,
                 ServiceConfig config)
    : dictionary_(std::move(dictionary)),
      backend_(std::move(backend)),
      sessions_(std::move(sessions)),
      config_(std::move(config)),
      suggester_(dictionary_, config_.suggest),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() { stop(); }

OJson Service::health() {
  const bool reachable = backend_->reachable();
  OJson j;
  j["status"] = reachable ? "ok" : "degraded";
  j["backend"] = {{"id", backend_->id()}, {"reachable", reachable}};
  j["dictionary"] = {{"words", dictionary_->word_count()},
                     {"buckets", dictionary_->bucket_count()},
                     {"pronunciations", dictionary_->classifier().phonemizer().dictionary_size()}};
  j["sessions"] = sessions_->size();
  return j;
}

void Service::routes() {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ConstraintConflict& e) {
      fail(res, 409, e.what());
    } catch (const InvalidRequest& e) {
      fail(res, 400, e.what());
    } catch (const UnknownSession& e) {
      fail(res, 404, std::string("unknown session: ") + e.what());
    } catch (const UnknownWord& e) {
      fail(res, 404, e.what());
    } catch (const BackendUnavailable& e) {
      fail(res, 503, e.what());
    } catch (const MalformedResponse& e) {
      fail(res, 502, e.what());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  });

  s.Post("/suggest", [this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const SuggestionRequest request = suggestion_request_from_json(body);
    std::uint64_t seed = mix_seed(config_.seed, req.body);
    if (body.contains("seed") && body["seed"].is_number_unsigned()) seed = body["seed"].get<std::uint64_t>();
    Rng rng(seed);
    OJson out = to_json(suggester_.suggest(request, *backend_, rng));
    out["backend"] = backend_->id();
    reply(res, 200, out);
  });

  s.Get("/rhymes", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("word") || req.get_param_value("word").empty()) {
      throw InvalidRequest("`word` query parameter is required");
    }
    const std::string word = req.get_param_value("word");
    const std::size_t k = req.has_param("k") ? parse_count(req.get_param_value("k"), "k") : 8;
    OJson rhymes = OJson::array();
    for (const auto& r : dictionary_->top_rhymes(word, k)) {
      rhymes.push_back({{"word", r.word}, {"frequency", r.frequency}});
    }
    reply(res, 200, OJson{{"word", word}, {"k", k}, {"rhymes", std::move(rhymes)}});
  });

  s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    SessionSettings settings;
    if (body.contains("settings")) {
      const Json& st = body["settings"];
      if (!st.is_object()) throw InvalidRequest("`settings` must be an object");
      if (st.contains("syllable_target") && !st["syllable_target"].is_null()) {
        if (!st["syllable_target"].is_number_integer() || st["syllable_target"].get<int>() < 1) {
          throw InvalidRequest("`settings.syllable_target` must be a positive integer");
        }
        settings.syllable_target = st["syllable_target"].get<int>();
      }
      if (st.contains("k")) {
        if (!st["k"].is_number_integer() || st["k"].get<long long>() < 1) {
          throw InvalidRequest("`settings.k` must be a positive integer");
        }
        settings.k = st["k"].get<std::size_t>();
      }
    }
    reply(res, 201, sessions_->create(settings).to_json());
  });

  s.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = sessions_->get(req.matches[1]);
    if (!session) throw UnknownSession(req.matches[1]);
    reply(res, 200, session->to_json());
  });

  s.Post(R"(/sessions/([^/]+)/accept)", [this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const auto line = optional_string(body, "line");
    if (!line || line->empty()) throw InvalidRequest("`line` is required");
    reply(res, 200, sessions_->accept(req.matches[1], *line).to_json());
  });

  s.Get("/health", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, health()); });
}

int Service::bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) throw IoError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  port_ = port;
  return port;
}

int Service::start() {
  const int port = bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::run() {
  bind();
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  if (sessions_) sessions_->flush();
}

}  // namespace linesmith
