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

#include <doctest.h>

#include <httplib.h>
#include <signal.h>
#include <unistd.h>

#include <chrono>
#include <json.hpp>
#include <regex>
#include <thread>

#include "cli_runner.hpp"
#include "linesmith/dataset.hpp"
#include "linesmith/ngram.hpp"
#include "linesmith/resources.hpp"
#include "linesmith/session_store.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace linesmith;
using namespace linesmith::testing;
using nlohmann::json;

namespace {

std::string corpus_path() { return data_file("synthetic_corpus.jsonl").string(); }

std::size_t count_lines(const std::filesystem::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::map<std::string, std::string> directory_contents(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  CHECK(run_cli({"frobnicate"}, dir.path()).exit_code == 1);
  CHECK(run_cli({"preprocess"}, dir.path()).exit_code == 1);
  CHECK(run_cli({"suggest", "a line", "--end-word", "home", "--force-rhyme"}, dir.path()).exit_code == 1);
  CHECK(run_cli({"suggest", "a", "b", "c", "d", "e"}, dir.path()).exit_code == 1);
  CHECK(run_cli({"train-baseline", "--corpus", corpus_path(), "--out", "x", "--order", "1"}, dir.path()).exit_code == 1);
  CHECK(run_cli({"--help"}, dir.path()).exit_code == 0);
}

TEST_CASE("data errors exit 2") {
  TempDir dir;
  const auto missing = (dir.path() / "nope.tsv").string();
  const auto r = run_cli({"evaluate", "--backend", "echo", "--data", missing}, dir.path());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("nope.tsv") != std::string::npos);
  CHECK(run_cli({"preprocess", "--corpus", missing, "--out", (dir.path() / "o").string()}, dir.path()).exit_code == 2);
}

TEST_CASE("backend errors exit 3") {
  TempDir dir;
  const auto url = "http://127.0.0.1:" + std::to_string(closed_port()) + "/generate";
  const auto r = run_cli({"suggest", "hello there", "--backend", "remote", "--remote-url", url, "--timeout-ms", "500"}, dir.path());
  CHECK(r.exit_code == 3);
}

TEST_CASE("preprocess writes a filtered corpus and is idempotent") {
  TempDir dir;
  const auto once = (dir.path() / "once.jsonl").string();
  const auto twice = (dir.path() / "twice.jsonl").string();
  const auto r = run_cli({"--json", "preprocess", "--corpus", corpus_path(), "--out", once, "--split-dir",
                          (dir.path() / "split").string()}, dir.path());
  REQUIRE(r.exit_code == 0);
  const auto stats = json::parse(r.out);
  CHECK(stats["songs_in"] == 20);
  CHECK(stats["verses_out"] == 37);
  CHECK(ingest(once).verse_count() == 37);
  CHECK(std::filesystem::exists(dir.path() / "split" / "train.jsonl"));
  CHECK(std::filesystem::exists(dir.path() / "split" / "test.jsonl"));
  REQUIRE(run_cli({"preprocess", "--corpus", once, "--out", twice}, dir.path()).exit_code == 0);
  CHECK(slurp(once) == slurp(twice));
}

TEST_CASE("build-dataset balances the combined tasks and is byte-deterministic") {
  TempDir dir;
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  for (const auto& out : {a, b}) {
    REQUIRE(run_cli({"--seed", "17", "build-dataset", "--corpus", corpus_path(), "--out", out.string(), "--kind",
                     "combined-list"}, dir.path()).exit_code == 0);
  }
  CHECK(directory_contents(a) == directory_contents(b));
  CHECK(count_lines(a / "train_rhyme.tsv") == count_lines(a / "train_ending.tsv"));
  CHECK(count_lines(a / "train_rhyme.tsv") > 0);
  CHECK(std::filesystem::exists(a / "train_rhyme_list.tsv"));
  CHECK(std::filesystem::exists(a / "manifest.tsv"));
  const auto manifest = read_manifest(a / "manifest.tsv");
  CHECK(!manifest.empty());

  const auto c = dir.path() / "c";
  REQUIRE(run_cli({"--seed", "18", "build-dataset", "--corpus", corpus_path(), "--out", c.string(), "--kind",
                   "combined-list"}, dir.path()).exit_code == 0);
  CHECK(directory_contents(a) != directory_contents(c));
}

TEST_CASE("train-baseline round-trips and honours the order") {
  TempDir dir;
  const auto model = dir.path() / "m.txt";
  REQUIRE(run_cli({"train-baseline", "--corpus", corpus_path(), "--out", model.string(), "--order", "4"}, dir.path()).exit_code == 0);
  std::ifstream in(model);
  const auto loaded = NgramModel::load(in);
  CHECK(loaded.order() == 4);
  std::ostringstream retrained;
  NgramModel::train(ingest(corpus_path()).all_lines(), 4).save(retrained);
  CHECK(slurp(model) == retrained.str());
}

TEST_CASE("evaluate with the echo backend writes the forced report deterministically") {
  TempDir dir;
  const auto ds = dir.path() / "ds";
  REQUIRE(run_cli({"build-dataset", "--corpus", corpus_path(), "--out", ds.string(), "--kind", "rhyme", "--no-split"},
                  dir.path()).exit_code == 0);
  const auto data = (ds / "all_rhyme.tsv").string();
  const auto r1 = (dir.path() / "r1.json").string();
  const auto r2 = (dir.path() / "r2.json").string();
  REQUIRE(run_cli({"evaluate", "--backend", "echo", "--data", data, "--out", r1}, dir.path()).exit_code == 0);
  REQUIRE(run_cli({"evaluate", "--backend", "echo", "--data", data, "--out", r2, "--serial"}, dir.path()).exit_code == 0);
  CHECK(slurp(r1) == slurp(r2));
  const auto report = json::parse(slurp(r1));
  CHECK(report["bleu"] == 100.0);
  CHECK(report["lexical_diversity_rmse"] == 0.0);
  CHECK(report["syllable_rmse"] == 0.0);
  CHECK(report["end_word_accuracy"] == 1.0);
  CHECK(report["backend_id"] == "echo");

  const auto b1 = (dir.path() / "b1.json").string();
  const auto b2 = (dir.path() / "b2.json").string();
  REQUIRE(run_cli({"--seed", "5", "evaluate", "--data", data, "--out", b1}, dir.path()).exit_code == 0);
  REQUIRE(run_cli({"--seed", "5", "evaluate", "--data", data, "--out", b2}, dir.path()).exit_code == 0);
  CHECK(slurp(b1) == slurp(b2));
  const auto baseline = json::parse(slurp(b1));
  for (const char* key : {"bleu", "lexical_diversity_rmse", "rhyme_score", "syllable_rmse", "end_word_accuracy"}) {
    CHECK(baseline[key].is_number());
  }
}

TEST_CASE("suggest constraints through the cli") {
  TempDir dir;
  SUBCASE("ending word") {
    const auto r = run_cli({"--json", "suggest", "close my eyes", "I see the light", "--end-word", "home", "-k", "4"}, dir.path());
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    REQUIRE(!out["candidates"].empty());
    CHECK(out["candidates"].size() <= 4);
    for (const auto& c : out["candidates"]) CHECK(c["report"]["end_word"] == "home");
  }
  SUBCASE("force rhyme") {
    const auto r = run_cli({"--json", "suggest", "we dance all through the night", "--force-rhyme", "-k", "2"}, dir.path());
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out["queries"].size() <= 8);
    CHECK(out["queries"].size() >= 1);
  }
  SUBCASE("syllables") {
    const auto r = run_cli({"--json", "suggest", "walking down the road", "--syllables", "6"}, dir.path());
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out["syllable_target"] == 6);
    CHECK(out["syllable_target_derived"] == false);
    for (const auto& c : out["candidates"]) CHECK(c["attempts"].get<int>() <= 5);
  }
  SUBCASE("same seed, same output") {
    const auto a = run_cli({"--seed", "3", "suggest", "walking down the road"}, dir.path());
    const auto b = run_cli({"--seed", "3", "suggest", "walking down the road"}, dir.path());
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("serve answers health and flushes sessions on SIGTERM") {
  TempDir dir;
  const auto log = dir.path() / "sessions.jsonl";
  const auto err_file = dir.path() / "serve.err";
  const pid_t pid = fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    const std::string cmd = "exec " + shell_quote(cli_path().string()) + " serve --port 0 --session-log " +
                            shell_quote(log.string()) + " 2>" + shell_quote(err_file.string());
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  int port = 0;
  const std::regex listening(R"(listening on [^:]+:(\d+))");
  for (int i = 0; i < 200 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    std::smatch m;
    const auto text = std::filesystem::exists(err_file) ? slurp(err_file) : std::string();
    if (std::regex_search(text, m, listening)) port = std::stoi(m[1]);
  }
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(json::parse(health->body)["status"] == "ok");
  const auto created = client.Post("/sessions", "{}", "application/json");
  REQUIRE(created);
  const std::string id = json::parse(created->body)["id"];
  REQUIRE(client.Post("/sessions/" + id + "/accept", R"({"line":"keep me"})", "application/json"));

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(slurp(err_file).find("session log flushed") != std::string::npos);
  SessionStore reopened(log);
  REQUIRE(reopened.get(id));
  CHECK(reopened.get(id)->accepted_lines == std::vector<std::string>{"keep me"});
}
