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

#include "kbr/protocol.hpp"

#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"

namespace kbr {

using nlohmann::json;

namespace {

template <class T, class Parse>
std::vector<T> parse_lines(std::string_view body, std::string_view origin, Parse parse) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto end = body.find('\n', pos);
    if (end == std::string_view::npos) end = body.size();
    const std::string_view line = body.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      throw ProtocolError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) out += " (+" + std::to_string(ids.size() - shown) + " more)";
  return out;
}

}  // namespace

PredictRequest make_request(const Example& example) {
  PredictRequest r;
  r.id = example.id;
  r.hypothesis = example.hypothesis.text;
  r.context.reserve(example.context.size());
  for (const auto& s : example.context) r.context.push_back(s.text);
  return r;
}

json to_json(const PredictRequest& r) {
  return {{"id", r.id}, {"context", r.context}, {"hypothesis", r.hypothesis}};
}

json to_json(const PredictResponse& r) { return {{"id", r.id}, {"p_true", r.p_true}}; }

PredictRequest request_from_json(const json& j) {
  PredictRequest r;
  r.id = j.at("id").get<std::string>();
  r.context = j.value("context", std::vector<std::string>{});
  r.hypothesis = j.at("hypothesis").get<std::string>();
  return r;
}

PredictResponse response_from_json(const json& j) {
  PredictResponse r;
  r.id = j.at("id").get<std::string>();
  const json& p = j.at("p_true");
  if (!p.is_number()) throw ProtocolError("p_true for " + r.id + " is not a number");
  r.p_true = p.get<double>();
  return r;
}

std::string to_ndjson(std::span<const PredictRequest> requests) {
  std::string out;
  for (const auto& r : requests) out += to_json(r).dump() + "\n";
  return out;
}

std::string to_ndjson(std::span<const PredictResponse> responses) {
  std::string out;
  for (const auto& r : responses) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<PredictRequest> parse_requests(std::string_view body, std::string_view origin) {
  return parse_lines<PredictRequest>(body, origin, request_from_json);
}

std::vector<PredictResponse> parse_responses(std::string_view body, std::string_view origin) {
  return parse_lines<PredictResponse>(body, origin, response_from_json);
}

std::vector<PredictResponse> match_responses(std::span<const PredictRequest> requests,
                                             std::vector<PredictResponse> responses) {
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!slot.emplace(requests[i].id, i).second) {
      throw ProtocolError("duplicate request id " + requests[i].id);
    }
  }
  std::vector<PredictResponse> out(requests.size());
  std::vector<bool> filled(requests.size(), false);
  for (auto& r : responses) {
    auto it = slot.find(r.id);
    if (it == slot.end()) throw ProtocolError("response for unknown id " + r.id);
    if (filled[it->second]) throw ProtocolError("duplicate response id " + r.id);
    if (!std::isfinite(r.p_true) || r.p_true < 0.0 || r.p_true > 1.0) {
      throw ProtocolError("p_true for " + r.id + " is " + std::to_string(r.p_true) +
                          ", expected a finite value in [0,1]");
    }
    filled[it->second] = true;
    out[it->second] = std::move(r);
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!filled[i]) missing.push_back(requests[i].id);
  }
  if (!missing.empty()) throw ProtocolError("no response for ids " + list_ids(missing));
  return out;
}

void ModelClient::prepare(std::string_view, std::span<const Example>) {}

std::vector<PredictResponse> batch_predict(ModelClient& client,
                                           std::span<const PredictRequest> requests,
                                           int retries) {
  if (requests.empty()) throw ClientError("batch_predict needs at least one request");
  std::string last_error;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    try {
      return match_responses(requests, client.predict(requests));
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  std::vector<std::string> ids;
  for (const auto& r : requests) ids.push_back(r.id);
  throw ClientError(client.describe() + " failed after " + std::to_string(retries + 1) +
                    " attempts (" + last_error + "); ids " + list_ids(ids));
}

}  // namespace kbr
