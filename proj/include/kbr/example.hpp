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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kbr/statement.hpp"
#include "kbr/verbalizer.hpp"

namespace kbr {

namespace flags {
inline constexpr const char* kHypernymsRemoved = "hypernyms_removed";
inline constexpr const char* kDistractorsRemoved = "distractors_removed";
inline constexpr const char* kQuantityDropped = "quantity_dropped";
inline constexpr const char* kSelectivity = "selectivity";
inline constexpr const char* kIntervened = "intervened";
inline constexpr const char* kWithDistractors = "with_distractors";
}  // namespace flags

struct ExampleMeta {
  std::string kind;
  std::string split;
  std::vector<std::string> skills;
  std::optional<int> k;
  std::optional<int> K;
  std::optional<double> c;
  std::string ordering;
  std::uint64_t seed = 0;
  std::map<std::string, bool> flags;
  // Generator-specific payload (template bindings, view name, ...).
  nlohmann::json extra = nlohmann::json::object();

  bool flag(const std::string& name) const {
    auto it = flags.find(name);
    return it != flags.end() && it->second;
  }
};

struct Example {
  std::string id;
  Statement hypothesis;
  std::vector<Statement> context;
  std::vector<Statement> withheld;
  bool label = false;
  ExampleMeta meta;

  /// context followed by withheld.
  std::vector<Statement> all_statements() const;
  bool has_tag(StatementTag tag) const;
};

nlohmann::json to_json(const Example& e);
/// Statements are re-parsed with `verbalizer`; text that matches no template
/// is kept as a raw statement.
Example example_from_json(const nlohmann::json& j, const Verbalizer& verbalizer);

void write_jsonl(std::ostream& out, std::span<const Example> examples);
void write_jsonl(const std::filesystem::path& path, std::span<const Example> examples);
std::vector<Example> read_jsonl(std::istream& in, const Verbalizer& verbalizer,
                                std::string_view origin);
std::vector<Example> read_jsonl(const std::filesystem::path& path, const Verbalizer& verbalizer);

/// Stats sidecar: counts per split, label balance, ablation fractions.
nlohmann::json dataset_stats(std::span<const Example> examples);

/// Zero-padded id: make_id("taxonomy", 12, "p") == "taxonomy-0000012-p".
std::string make_id(std::string_view prefix, std::size_t index, std::string_view suffix = {});

}  // namespace kbr
