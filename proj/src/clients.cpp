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

#include "kbr/clients.hpp"

#include <fstream>
#include <future>
#include <sstream>
#include <unordered_set>

#include <httplib.h>

#include "kbr/error.hpp"

namespace kbr {

// ---------------------------------------------------------------- file pair

FilePairClient::FilePairClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

void FilePairClient::prepare(std::string_view stage, std::span<const Example>) {
  stage_ = std::string(stage);
}

std::filesystem::path FilePairClient::requests_path() const {
  return dir_ / (stage_ + ".requests.jsonl");
}

std::filesystem::path FilePairClient::responses_path() const {
  return dir_ / (stage_ + ".responses.jsonl");
}

std::vector<PredictResponse> FilePairClient::predict(std::span<const PredictRequest> batch) {
  std::filesystem::create_directories(dir_);
  {
    std::ofstream out(requests_path(), std::ios::binary);
    if (!out) throw ClientError("cannot write " + requests_path().string());
    out << to_ndjson(batch);
  }
  std::ifstream in(responses_path(), std::ios::binary);
  if (!in) {
    throw ClientError("wrote " + std::to_string(batch.size()) + " requests to " +
                      requests_path().string() + "; waiting for " + responses_path().string());
  }
  std::stringstream body;
  body << in.rdbuf();
  return parse_responses(body.str(), responses_path().string());
}

std::string FilePairClient::describe() const { return "file:" + dir_.string(); }

// --------------------------------------------------------------------- http

HttpClient::HttpClient(HttpOptions options) : options_(std::move(options)) {
  if (options_.batch_size == 0 || options_.max_in_flight == 0) {
    throw Error("http batch size and in-flight limit must be positive");
  }
  const std::string& url = options_.endpoint;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw Error("endpoint '" + url + "' must start with http://");
  }
  const auto slash = url.find('/', scheme + 3);
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/predict" : url.substr(slash);
  if (path_ == "/") path_ = "/predict";
}

std::vector<PredictResponse> HttpClient::post(std::span<const PredictRequest> chunk) const {
  httplib::Client client(base_);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  const std::string body = to_ndjson(chunk);
  auto res = client.Post(path_, body, std::string(kNdjsonType));
  if (!res) {
    throw TransportError("POST " + options_.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw TransportError("POST " + options_.endpoint + ": HTTP " + std::to_string(res->status) +
                         " " + res->body);
  }
  if (res->status != 200) {
    throw ProtocolError("POST " + options_.endpoint + ": HTTP " + std::to_string(res->status) +
                        " " + res->body);
  }
  return parse_responses(res->body, options_.endpoint);
}

std::vector<PredictResponse> HttpClient::predict(std::span<const PredictRequest> batch) {
  std::vector<std::span<const PredictRequest>> chunks;
  for (std::size_t i = 0; i < batch.size(); i += options_.batch_size) {
    chunks.push_back(batch.subspan(i, std::min(options_.batch_size, batch.size() - i)));
  }
  std::vector<PredictResponse> out;
  out.reserve(batch.size());
  for (std::size_t wave = 0; wave < chunks.size(); wave += options_.max_in_flight) {
    const std::size_t end = std::min(chunks.size(), wave + options_.max_in_flight);
    std::vector<std::future<std::vector<PredictResponse>>> pending;
    for (std::size_t c = wave; c < end; ++c) {
      pending.push_back(std::async(std::launch::async, [this, chunk = chunks[c]] {
        return post(chunk);
      }));
    }
    // get() in order; every future is drained before an error propagates.
    std::exception_ptr first_error;
    for (auto& f : pending) {
      try {
        auto part = f.get();
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }
  return out;
}

// ----------------------------------------------------------------- believer

BelieverClient::BelieverClient(BeliefTable beliefs, Verbalizer verbalizer, std::string name,
                               Execution exec)
    : beliefs_(std::move(beliefs)),
      verbalizer_(std::move(verbalizer)),
      name_(std::move(name)),
      exec_(exec) {}

void BelieverClient::prepare(std::string_view, std::span<const Example> examples) {
  for (const auto& e : examples) registered_.insert_or_assign(e.id, e);
}

BelieverClient::Resolved BelieverClient::resolve(const PredictRequest& request) const {
  Resolved r;
  auto parse_context = [&] {
    std::vector<Statement> out;
    out.reserve(request.context.size());
    for (const auto& text : request.context) out.push_back(verbalizer_.parse_any(text));
    return out;
  };

  auto it = registered_.find(request.id);
  if (it != registered_.end()) {
    Example e = it->second;
    bool same_context = e.context.size() == request.context.size();
    for (std::size_t i = 0; same_context && i < e.context.size(); ++i) {
      same_context = e.context[i].text == request.context[i];
    }
    if (!same_context) e.context = parse_context();
    if (e.hypothesis.text != request.hypothesis) {
      e.hypothesis = verbalizer_.parse_any(request.hypothesis);
    }
    if (e.hypothesis.is_fact()) {
      r.hypothesis = e.hypothesis.fact();
      r.premises = believer_premises(beliefs_, e);
    }
    return r;
  }

  const Statement h = verbalizer_.parse_any(request.hypothesis);
  if (!h.is_fact()) return r;
  r.hypothesis = h.fact();
  const TripleKey key = h.fact().key();
  if (const Belief* b = beliefs_.find(key)) {
    r.probe = b->p_true();
    if (request.context.empty()) return r;
  }
  r.premises = parse_context();
  std::erase_if(r.premises, [](const Statement& s) { return s.is_raw(); });
  std::unordered_set<TripleKey> stated;
  for (const auto& s : r.premises) {
    if (s.is_fact()) stated.insert(s.fact().key());
  }
  for (const auto& [k, belief] : beliefs_.about(key.subject)) {
    if (k == key || stated.contains(k)) continue;
    r.premises.push_back(Statement{"", StatementTag::Plain,
                                   Triple{k.subject, k.predicate, k.object, belief.believed, {}}});
  }
  return r;
}

double BelieverClient::predict_one(const PredictRequest& request) const {
  const Resolved r = resolve(request);
  if (!r.hypothesis) return 0.5;
  if (r.probe && r.premises.empty()) return *r.probe;
  const double derived = score_premises(r.premises, *r.hypothesis, verbalizer_.registry());
  // A held belief answers whatever the context leaves open.
  return derived == 0.5 && r.probe ? *r.probe : derived;
}

Verdict BelieverClient::explain(const PredictRequest& request) const {
  const Resolved r = resolve(request);
  Verdict v;
  if (!r.hypothesis) return v;
  if (!r.premises.empty() || !r.probe) {
    v = entail(r.premises, *r.hypothesis, verbalizer_.registry());
    if (v.value != Truth::Unknown || !r.probe) return v;
  }
  const bool believed = *r.probe >= 0.5;
  v.value = believed ? Truth::True : Truth::False;
  v.derivation = {{"belief", r.hypothesis->with_truth(believed), {}, {}}};
  return v;
}

std::vector<PredictResponse> BelieverClient::predict(std::span<const PredictRequest> batch) {
  std::vector<PredictResponse> out(batch.size());
  for_each_index(batch.size(), exec_, [&](std::size_t i) {
    out[i] = {batch[i].id, predict_one(batch[i])};
  });
  return out;
}

BelieverClient make_oracle_client(const KnowledgeBase& kb, std::span<const Example> examples,
                                  Execution exec) {
  return BelieverClient(corrupt_beliefs(kb, 0.0, 0, examples), kb.verbalizer(), "oracle", exec);
}

}  // namespace kbr
