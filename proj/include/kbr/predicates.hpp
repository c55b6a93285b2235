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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kbr {

/// How the reasoner and the generators treat a predicate.
///
///   Hypernym  the IsA carrier of downward monotonicity
///   Property  inherited by hyponyms, both polarities
///   Meronym   chains transitively through itself
///   Member    counted against quantity facts
///   Quantity  has-K; the object slot names a member predicate
///   Size      opaque comparison, usable as a rule condition
///   Other     verbalized only
enum class PredicateRole { Hypernym, Property, Meronym, Member, Quantity, Size, Other };

std::string_view to_string(PredicateRole role);
PredicateRole role_from_string(std::string_view name);

struct Predicate {
  std::string name;
  PredicateRole role = PredicateRole::Other;
  // Templates with SUBJ and OBJ slots.
  std::string positive;
  std::string negative;
  // "is a OBJ"; when set the predicate can appear as a rule condition.
  std::string condition;
  // Member predicates: nouns used by quantity facts ("member", "members").
  std::string count_noun_singular;
  std::string count_noun_plural;
  // Quantity predicates: the K of has-K.
  int count = 0;

  bool inheritable() const {
    return role == PredicateRole::Hypernym || role == PredicateRole::Property;
  }
};

/// The set of predicates known to the toolkit, loaded from a template file
/// ({"predicate","positive","negative",...} per line).
class PredicateRegistry {
 public:
  PredicateRegistry() = default;

  static PredicateRegistry load(const std::filesystem::path& path);
  static PredicateRegistry parse(std::istream& in, std::string_view origin);

  /// Registry shipped in data/templates.jsonl (or $KBR_TEMPLATES).
  static const PredicateRegistry& builtin();
  static std::filesystem::path default_path();

  void add(Predicate predicate);

  const Predicate* find(std::string_view name) const;
  const Predicate& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::span<const Predicate> all() const { return predicates_; }

  /// Name of the unique Hypernym-role predicate.
  const std::string& hypernym() const;
  std::optional<std::string> quantity_predicate(int count) const;
  std::vector<std::string> with_role(PredicateRole role) const;

 private:
  std::vector<Predicate> predicates_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string hypernym_;
};

}  // namespace kbr
