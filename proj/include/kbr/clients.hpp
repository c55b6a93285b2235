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

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>

#include "kbr/beliefs.hpp"
#include "kbr/parallel.hpp"
#include "kbr/protocol.hpp"
#include "kbr/reasoner.hpp"

namespace kbr {

/// Offline exchange through files: each stage writes
/// <dir>/<stage>.requests.jsonl and reads <dir>/<stage>.responses.jsonl,
/// produced by an external model in between runs.
class FilePairClient : public ModelClient {
 public:
  explicit FilePairClient(std::filesystem::path dir);

  void prepare(std::string_view stage, std::span<const Example> examples) override;
  /// Throws ClientError when the responses file is not there yet.
  std::vector<PredictResponse> predict(std::span<const PredictRequest> batch) override;
  std::string describe() const override;

  std::filesystem::path requests_path() const;
  std::filesystem::path responses_path() const;

 private:
  std::filesystem::path dir_;
  std::string stage_ = "predict";
};

struct HttpOptions {
  std::string endpoint;  // http://host:port, optionally with a path; default path /predict
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  int timeout_seconds = 120;
};

/// POSTs ndjson batches; at most max_in_flight batches are outstanding.
/// Connection failures and 5xx replies raise TransportError (retried by
/// batch_predict); 4xx replies raise ProtocolError.
class HttpClient : public ModelClient {
 public:
  explicit HttpClient(HttpOptions options);

  std::vector<PredictResponse> predict(std::span<const PredictRequest> batch) override;
  std::string describe() const override { return options_.endpoint; }

 private:
  std::vector<PredictResponse> post(std::span<const PredictRequest> chunk) const;

  HttpOptions options_;
  std::string base_;
  std::string path_;
};

/// Perfectly systematic reasoner whose only knowledge is a belief table.
///
/// Requests are resolved three ways:
///   - id announced through prepare(): the example's withheld facts in
///     belief scope are filled in from the table (see believer_premises);
///   - unknown id, empty context, hypothesis in the table: a belief probe,
///     answered with the belief's p_true;
///   - otherwise (interactive use): the context plus every belief about the
///     hypothesis subject except the hypothesis itself. When that leaves the
///     hypothesis undecided, a belief about it answers instead.
class BelieverClient : public ModelClient {
 public:
  BelieverClient(BeliefTable beliefs, Verbalizer verbalizer, std::string name = "believer",
                 Execution exec = Execution::Parallel);

  void prepare(std::string_view stage, std::span<const Example> examples) override;
  std::vector<PredictResponse> predict(std::span<const PredictRequest> batch) override;
  std::string describe() const override { return name_; }

  double predict_one(const PredictRequest& request) const;
  /// Derivation behind predict_one. Probes yield a single "belief" step.
  /// Throws ContradictionError when the premises conflict.
  Verdict explain(const PredictRequest& request) const;

  const BeliefTable& beliefs() const { return beliefs_; }

 private:
  struct Resolved {
    std::optional<Triple> hypothesis;
    std::vector<Statement> premises;
    std::optional<double> probe;
  };
  Resolved resolve(const PredictRequest& request) const;

  BeliefTable beliefs_;
  Verbalizer verbalizer_;
  std::string name_;
  Execution exec_;
  std::unordered_map<std::string, Example> registered_;
};

/// Believer holding every KB truth (and the examples' withheld facts).
BelieverClient make_oracle_client(const KnowledgeBase& kb, std::span<const Example> examples = {},
                                  Execution exec = Execution::Parallel);

}  // namespace kbr
