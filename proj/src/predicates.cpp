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

#include "kbr/predicates.hpp"

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "kbr/error.hpp"

#ifndef KBR_DATA_DIR
#define KBR_DATA_DIR "data"
#endif

namespace kbr {

namespace {

constexpr std::pair<PredicateRole, std::string_view> kRoleNames[] = {
    {PredicateRole::Hypernym, "hypernym"}, {PredicateRole::Property, "property"},
    {PredicateRole::Meronym, "meronym"},   {PredicateRole::Member, "member"},
    {PredicateRole::Quantity, "quantity"}, {PredicateRole::Size, "size"},
    {PredicateRole::Other, "other"},
};

bool has_slot(const std::string& text, std::string_view slot) {
  return text.find(slot) != std::string::npos;
}

}  // namespace

std::string_view to_string(PredicateRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "other";
}

PredicateRole role_from_string(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  throw LoadError("unknown predicate role '" + std::string(name) + "'");
}

void PredicateRegistry::add(Predicate p) {
  if (p.name.empty()) throw LoadError("predicate with empty name");
  if (p.positive.empty() || p.negative.empty()) {
    throw LoadError("predicate '" + p.name + "' needs both a positive and a negative template");
  }
  for (const auto* text : {&p.positive, &p.negative}) {
    if (!has_slot(*text, "SUBJ") || !has_slot(*text, "OBJ")) {
      throw LoadError("template '" + *text + "' of predicate '" + p.name +
                      "' must contain SUBJ and OBJ");
    }
  }
  if (!p.condition.empty() && !has_slot(p.condition, "OBJ")) {
    throw LoadError("condition template of '" + p.name + "' must contain OBJ");
  }
  if (p.role == PredicateRole::Member &&
      (p.count_noun_singular.empty() || p.count_noun_plural.empty())) {
    throw LoadError("member predicate '" + p.name + "' needs count_noun [singular, plural]");
  }
  if (p.role == PredicateRole::Quantity && (p.count < 1 || p.count > 5)) {
    throw LoadError("quantity predicate '" + p.name + "' needs count in 1..5");
  }
  if (p.role == PredicateRole::Hypernym) {
    if (!hypernym_.empty() && hypernym_ != p.name) {
      throw LoadError("more than one hypernym predicate: '" + hypernym_ + "' and '" + p.name + "'");
    }
    hypernym_ = p.name;
  }
  if (index_.contains(p.name)) throw LoadError("duplicate predicate '" + p.name + "'");
  index_.emplace(p.name, predicates_.size());
  predicates_.push_back(std::move(p));
}

const Predicate* PredicateRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &predicates_[it->second];
}

const Predicate& PredicateRegistry::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw LoadError("unknown predicate '" + std::string(name) + "'");
}

const std::string& PredicateRegistry::hypernym() const {
  if (hypernym_.empty()) throw LoadError("registry has no hypernym predicate");
  return hypernym_;
}

std::optional<std::string> PredicateRegistry::quantity_predicate(int count) const {
  for (const auto& p : predicates_) {
    if (p.role == PredicateRole::Quantity && p.count == count) return p.name;
  }
  return std::nullopt;
}

std::vector<std::string> PredicateRegistry::with_role(PredicateRole role) const {
  std::vector<std::string> out;
  for (const auto& p : predicates_) {
    if (p.role == role) out.push_back(p.name);
  }
  return out;
}

PredicateRegistry PredicateRegistry::parse(std::istream& in, std::string_view origin) {
  PredicateRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(where() + ": " + e.what());
    }
    try {
      Predicate p;
      p.name = j.at("predicate").get<std::string>();
      p.positive = j.at("positive").get<std::string>();
      p.negative = j.at("negative").get<std::string>();
      p.role = role_from_string(j.value("role", std::string("other")));
      p.condition = j.value("condition", std::string());
      if (j.contains("count_noun")) {
        auto nouns = j.at("count_noun").get<std::vector<std::string>>();
        if (nouns.size() != 2) throw LoadError("count_noun must be [singular, plural]");
        p.count_noun_singular = nouns[0];
        p.count_noun_plural = nouns[1];
      }
      p.count = j.value("count", 0);
      registry.add(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(where() + ": " + e.what());
    } catch (const LoadError& e) {
      throw LoadError(where() + ": " + e.what());
    }
  }
  return registry;
}

PredicateRegistry PredicateRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open template file " + path.string());
  return parse(in, path.string());
}

std::filesystem::path PredicateRegistry::default_path() {
  if (const char* env = std::getenv("KBR_TEMPLATES"); env && *env) return env;
  return std::filesystem::path(KBR_DATA_DIR) / "templates.jsonl";
}

const PredicateRegistry& PredicateRegistry::builtin() {
  static const PredicateRegistry registry = load(default_path());
  return registry;
}

}  // namespace kbr
