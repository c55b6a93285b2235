// Copyright 2026 The kbreason Authors. All Rights Reserved.
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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kbr/clients.hpp"
#include "kbr/error.hpp"
#include "kbr/random.hpp"

using namespace kbr;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(KBR_TEST_DATA) / "golden";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Deterministic stand-in for a model: a hash of the framed input.
double stub_p_true(const PredictRequest& r) {
  std::string frame = "[CLS]";
  for (const auto& c : r.context) frame += " " + c;
  frame += " [SEP] " + r.hypothesis + " [SEP]";
  return static_cast<double>(fnv1a(frame) % 1001) / 1000.0;
}

// Serves POST /predict on an ephemeral localhost port for the lifetime of
// the object. The handler maps a request body to (status, body).
class StubServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::string&)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      auto [status, body] = handler_(req.body);
      res.status = status;
      res.set_content(body, std::string(kNdjsonType));
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> calls{0};

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::pair<int, std::string> hash_model(const std::string& body) {
  std::vector<PredictResponse> out;
  for (const auto& r : parse_requests(body, "stub")) out.push_back({r.id, stub_p_true(r)});
  return {200, to_ndjson(out)};
}

std::vector<PredictRequest> numbered(std::size_t n) {
  std::vector<PredictRequest> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"r" + std::to_string(i), {"A cow is an animal."}, "A cow is a thing."});
  }
  return out;
}

class FlakyClient : public ModelClient {
 public:
  explicit FlakyClient(int failures) : failures_(failures) {}
  std::vector<PredictResponse> predict(std::span<const PredictRequest> batch) override {
    ++calls;
    if (failures_-- > 0) throw TransportError("connection reset");
    std::vector<PredictResponse> out;
    // Reversed on purpose: callers must not rely on response order.
    for (auto it = batch.rbegin(); it != batch.rend(); ++it) out.push_back({it->id, 0.75});
    return out;
  }
  std::string describe() const override { return "flaky"; }
  int calls = 0;

 private:
  int failures_;
};

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("golden requests parse and re-serialize byte for byte") {
  const std::string body = slurp(kGolden / "requests.jsonl");
  const auto requests = parse_requests(body, "requests.jsonl");
  REQUIRE(requests.size() == 6);
  CHECK(requests[1].context.empty());
  CHECK(requests[4].context[0] == "He said \"hello\" to a back\\slash.");
  CHECK(to_ndjson(requests) == body);

  const std::string responses = slurp(kGolden / "responses.jsonl");
  CHECK(to_ndjson(parse_responses(responses, "responses.jsonl")) == responses);
}

TEST_CASE("http client against the hash stub reproduces the golden responses") {
  StubServer server(hash_model);
  HttpOptions o;
  o.endpoint = server.endpoint();
  o.batch_size = 4;  // two posts for six requests
  HttpClient client(o);
  const auto requests = parse_requests(slurp(kGolden / "requests.jsonl"), "requests.jsonl");
  const auto responses = batch_predict(client, requests);
  CHECK(to_ndjson(responses) == slurp(kGolden / "responses.jsonl"));
  CHECK(server.calls == 2);
}

TEST_CASE("a constant 0.5 model scores as all ties") {
  StubServer server([](const std::string& body) {
    std::vector<PredictResponse> out;
    for (const auto& r : parse_requests(body, "stub")) out.push_back({r.id, 0.5});
    return std::pair<int, std::string>{200, to_ndjson(out)};
  });
  HttpOptions o;
  o.endpoint = server.endpoint() + "/predict";
  o.batch_size = 7;
  o.max_in_flight = 2;
  HttpClient client(o);
  const auto requests = numbered(40);
  const auto responses = batch_predict(client, requests);
  REQUIRE(responses.size() == 40);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    CHECK(responses[i].id == requests[i].id);
    CHECK(responses[i].p_true == 0.5);
  }
  CHECK(server.calls == 6);
}

TEST_CASE("server errors are retried, client errors are not") {
  std::atomic<int> remaining_failures{2};
  StubServer flaky([&](const std::string& body) {
    if (remaining_failures-- > 0) return std::pair<int, std::string>{503, "busy"};
    return hash_model(body);
  });
  HttpClient client({flaky.endpoint()});
  const auto requests = numbered(3);
  CHECK(batch_predict(client, requests, 3).size() == 3);
  CHECK(flaky.calls == 3);

  StubServer rejecting([](const std::string&) { return std::pair<int, std::string>{400, "no"}; });
  HttpClient strict({rejecting.endpoint()});
  CHECK_THROWS_AS(batch_predict(strict, requests, 3), ProtocolError);
  CHECK(rejecting.calls == 1);

  StubServer down([](const std::string&) { return std::pair<int, std::string>{500, "down"}; });
  HttpClient doomed({down.endpoint()});
  const std::string msg = error_of([&] { batch_predict(doomed, requests, 2); });
  CHECK(msg.find("failed after 3 attempts") != std::string::npos);
  CHECK(msg.find("r0") != std::string::npos);
  CHECK(down.calls == 3);
}

TEST_CASE("unreachable endpoint is a transport failure") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpOptions o;
  o.endpoint = "http://127.0.0.1:" + std::to_string(port);
  o.timeout_seconds = 2;
  HttpClient client(o);
  CHECK_THROWS_AS(batch_predict(client, numbered(1), 1), ClientError);
  CHECK_THROWS_AS(HttpClient({"ftp://x"}), Error);
}

TEST_CASE("batch_predict retries transport errors and restores request order") {
  const auto requests = numbered(5);
  FlakyClient twice(2);
  const auto out = batch_predict(twice, requests, 3);
  CHECK(twice.calls == 3);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].id == requests[i].id);

  FlakyClient hopeless(10);
  CHECK_THROWS_AS(batch_predict(hopeless, requests, 1), ClientError);
  CHECK(hopeless.calls == 2);
  CHECK_THROWS_AS(batch_predict(twice, std::span<const PredictRequest>{}), ClientError);
}

TEST_CASE("response matching rejects malformed answers") {
  const auto requests = numbered(3);
  auto ok = [&] { return std::vector<PredictResponse>{{"r2", 1.0}, {"r0", 0.0}, {"r1", 0.3}}; };
  const auto matched = match_responses(requests, ok());
  CHECK(matched[0].p_true == 0.0);
  CHECK(matched[1].p_true == 0.3);

  auto with = [&](auto edit) {
    auto r = ok();
    edit(r);
    return error_of([&] { match_responses(requests, r); });
  };
  CHECK(with([](auto& r) { r.pop_back(); }).find("no response for ids r1") != std::string::npos);
  CHECK(with([](auto& r) { r[0].id = "zz"; }).find("unknown id zz") != std::string::npos);
  CHECK(with([](auto& r) { r[0].id = "r0"; }).find("duplicate response id r0") !=
        std::string::npos);
  CHECK(with([](auto& r) { r[0].p_true = 1.5; }).find("p_true for r2") != std::string::npos);
  CHECK(with([](auto& r) { r[0].p_true = std::nan(""); }).find("p_true for r2") !=
        std::string::npos);

  auto dup = requests;
  dup.push_back(dup[0]);
  CHECK_THROWS_AS(match_responses(dup, ok()), ProtocolError);
}

TEST_CASE("ndjson parse errors carry origin and line") {
  CHECK(parse_requests("", "x").empty());
  CHECK(parse_requests("\n\n", "x").empty());
  const std::string two = R"({"id":"a","context":[],"hypothesis":"h"})"
                          "\n"
                          R"({"id":"b","context":"oops","hypothesis":"h"})";
  CHECK(error_of([&] { parse_requests(two, "req.jsonl"); }).find("req.jsonl:2") !=
        std::string::npos);
  CHECK(error_of([] { parse_responses("{not json", "resp.jsonl"); }).find("resp.jsonl:1") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_responses(R"({"id":"a","p_true":"high"})", "r"), ProtocolError);
  CHECK_THROWS_AS(parse_responses(R"({"p_true":0.2})", "r"), ProtocolError);
}

TEST_CASE("file pair client writes requests and reads answers") {
  const fs::path dir = fs::temp_directory_path() / "kbr_file_pair_test";
  fs::remove_all(dir);
  FilePairClient client(dir);
  client.prepare("IMPLICIT", {});
  const auto requests = numbered(2);
  const std::string msg = error_of([&] { client.predict(requests); });
  CHECK(msg.find("wrote 2 requests") != std::string::npos);
  CHECK(msg.find("IMPLICIT.responses.jsonl") != std::string::npos);
  CHECK(slurp(dir / "IMPLICIT.requests.jsonl") == to_ndjson(requests));
  // A missing file is not retried: the external model has to run first.
  CHECK_THROWS_AS(batch_predict(client, requests), ClientError);

  {
    std::ofstream out(dir / "IMPLICIT.responses.jsonl");
    out << R"({"id":"r1","p_true":0.9})" << "\n" << R"({"id":"r0","p_true":0.1})" << "\n";
  }
  const auto got = batch_predict(client, requests);
  CHECK(got[0].p_true == 0.1);
  CHECK(got[1].p_true == 0.9);
  fs::remove_all(dir);
}

TEST_CASE("believer answers the motivating request over HTTP-shaped input") {
  const KnowledgeBase kb(PredicateRegistry::builtin(),
                         {{"whale", "IsA", "mammal", true, {}},
                          {"mammal", "has a", "belly button", true, {}}},
                         {});
  auto client = make_oracle_client(kb, {}, Execution::Serial);
  const PredictRequest whale{"w", {"A mammal has a belly button."}, "A whale has a belly button."};
  // Context alone does not entail it; the believer adds what it knows about whales.
  CHECK(client.predict_one(whale) == 1.0);
  const PredictRequest probe{"p", {}, "A whale is a mammal."};
  // A bare probe reports the belief's confidence, which exceeds 0.5 when held.
  CHECK(client.predict_one(probe) > 0.5);
  CHECK(client.predict_one(probe) == client.beliefs().find({"whale", "IsA", "mammal"})->p_true());
  CHECK(client.explain(probe).derivation.size() == 1);
  const PredictRequest unknown{"u", {}, "A whale is a fish."};
  CHECK(client.predict_one(unknown) == 0.5);
}
