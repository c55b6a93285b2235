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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbr/clients.hpp"
#include "kbr/protocol.hpp"
#include "kbr/verbalizer.hpp"

namespace kbr {

struct SessionEntry {
  std::string text;
  std::string timestamp;  // ISO 8601, UTC

  bool operator==(const SessionEntry&) const = default;
};

/// Asserted statements, one JSON object per line: {"text","time"}.
/// Without a path the store lives in memory only.
class SessionStore {
 public:
  SessionStore() = default;
  /// Loads the file when it exists. Throws LoadError on a malformed line.
  explicit SessionStore(std::filesystem::path path);

  void add(SessionEntry entry);
  /// 1-based, as listed to the user. Throws Error when out of range.
  SessionEntry retract(std::size_t n);
  void clear();

  const std::vector<SessionEntry>& entries() const { return entries_; }
  std::vector<std::string> texts() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void rewrite() const;

  std::optional<std::filesystem::path> path_;
  std::vector<SessionEntry> entries_;
};

std::string utc_timestamp();

/// Line-oriented teach loop. Any other input is a hypothesis, scored with the
/// asserted statements as context:
///
///   assert <statement>   add to the store
///   retract <n> | all    remove one or every statement
///   list                 show the store
///   why                  derivation of the last answer (builtin clients)
///   help, quit
class TeachSession {
 public:
  struct Options {
    bool strict = true;  // warn on statements the parser cannot read
    int retries = 3;
    std::function<std::string()> clock = utc_timestamp;
  };

  /// `explainer` is the builtin client behind `client` when there is one;
  /// it enables `why`.
  TeachSession(ModelClient& client, const Verbalizer& verbalizer, SessionStore& store,
               const BelieverClient* explainer, Options options);
  TeachSession(ModelClient& client, const Verbalizer& verbalizer, SessionStore& store,
               const BelieverClient* explainer = nullptr)
      : TeachSession(client, verbalizer, store, explainer, Options{}) {}

  /// Output for one input line.
  std::string handle(std::string_view line);
  bool finished() const { return finished_; }

  /// Reads lines until EOF or quit, printing a prompt before each one.
  void run(std::istream& in, std::ostream& out, bool prompt = true);

  /// p_true for `hypothesis` under the current store.
  double query(std::string_view hypothesis);

 private:
  std::string answer(std::string_view hypothesis);
  std::string assert_statement(std::string_view text);
  std::string retract(std::string_view arg);
  std::string list() const;
  std::string why() const;

  ModelClient* client_;
  const Verbalizer* verbalizer_;
  SessionStore* store_;
  const BelieverClient* explainer_;
  Options options_;
  std::size_t queries_ = 0;
  std::optional<PredictRequest> last_;
  bool finished_ = false;
};

}  // namespace kbr
