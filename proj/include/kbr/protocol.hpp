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

#pragma once

// Model wire protocol. A request carries raw strings only; a response
// carries the probability that the hypothesis is true.
//
//   request  {"id": "...", "context": ["...", ...], "hypothesis": "..."}
//   response {"id": "...", "p_true": 0.93}
//
// Over HTTP both directions are newline-delimited JSON
// (application/x-ndjson), POSTed to /predict.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/example.hpp"

namespace kbr {

struct PredictRequest {
  std::string id;
  std::vector<std::string> context;
  std::string hypothesis;

  bool operator==(const PredictRequest&) const = default;
};

struct PredictResponse {
  std::string id;
  double p_true = 0.5;

  bool operator==(const PredictResponse&) const = default;
};

inline constexpr std::string_view kNdjsonType = "application/x-ndjson";

PredictRequest make_request(const Example& example);

nlohmann::json to_json(const PredictRequest& r);
nlohmann::json to_json(const PredictResponse& r);
PredictRequest request_from_json(const nlohmann::json& j);
PredictResponse response_from_json(const nlohmann::json& j);

/// One JSON object per line, each line newline-terminated.
std::string to_ndjson(std::span<const PredictRequest> requests);
std::string to_ndjson(std::span<const PredictResponse> responses);
/// Throws ProtocolError naming `origin` and the line number.
std::vector<PredictRequest> parse_requests(std::string_view body, std::string_view origin);
std::vector<PredictResponse> parse_responses(std::string_view body, std::string_view origin);

/// Reorders `responses` to request order. Throws ProtocolError on a missing,
/// duplicate or unknown id, or on p_true that is non-finite or outside [0,1].
std::vector<PredictResponse> match_responses(std::span<const PredictRequest> requests,
                                             std::vector<PredictResponse> responses);

/// Anything that answers predict requests.
class ModelClient {
 public:
  virtual ~ModelClient() = default;

  /// Announces the examples behind the next requests and a stage name
  /// (setup or probe). Simulated clients read withheld facts from them;
  /// clients for real models ignore the examples.
  virtual void prepare(std::string_view stage, std::span<const Example> examples);
  virtual std::vector<PredictResponse> predict(std::span<const PredictRequest> batch) = 0;
  virtual std::string describe() const = 0;
};

/// predict() with validation. TransportError is retried up to `retries`
/// times; after that a ClientError lists the affected ids.
std::vector<PredictResponse> batch_predict(ModelClient& client,
                                           std::span<const PredictRequest> requests,
                                           int retries = 3);

}  // namespace kbr
