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
#include <unordered_set>
#include <vector>

#include "kbr/predicates.hpp"
#include "kbr/random.hpp"
#include "kbr/triple.hpp"
#include "kbr/verbalizer.hpp"

namespace kbr {

enum class TripleFormat { Tsv, Jsonl };

TripleFormat format_from_path(const std::filesystem::path& path);

/// Filter for sample_triple. Unset fields match anything.
struct TripleFilter {
  std::optional<std::string> subject;
  std::optional<std::string> predicate;
  std::optional<std::string> object;
  std::optional<bool> truth;
  std::optional<PredicateRole> role;

  bool matches(const Triple& t, const PredicateRegistry& registry) const;
  std::string describe() const;
};

/// Immutable, indexed triple store.
///
/// Indexes hold positions into triples(), so they are cheap to copy and
/// rebuilding from the same triple list gives identical indexes.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(const PredicateRegistry& registry = PredicateRegistry::builtin());
  KnowledgeBase(const PredicateRegistry& registry, std::vector<Triple> triples,
                SurfaceForms surfaces = {});

  static KnowledgeBase load(const std::filesystem::path& path,
                            const PredicateRegistry& registry = PredicateRegistry::builtin());
  static KnowledgeBase read(std::istream& in, TripleFormat format, std::string_view origin,
                            const PredicateRegistry& registry = PredicateRegistry::builtin());

  const PredicateRegistry& registry() const { return *registry_; }
  const SurfaceForms& surfaces() const { return surfaces_; }
  Verbalizer verbalizer() const { return Verbalizer(*registry_, &surfaces_); }

  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const Triple* find(const TripleKey& key) const;
  std::optional<bool> truth_of(const TripleKey& key) const;

  std::span<const std::size_t> by_subject(const std::string& subject) const;
  std::span<const std::size_t> by_object(const std::string& object) const;
  std::span<const std::size_t> by_predicate(const std::string& predicate) const;

  /// Objects of true IsA edges from `subject`.
  std::span<const std::string> hypernyms(const std::string& subject) const;
  /// Subjects of true IsA edges into `object`.
  std::span<const std::string> hyponyms(const std::string& object) const;
  /// Objects of true meronym-role edges from `subject`.
  std::span<const std::string> meronyms(const std::string& subject) const;
  /// Property-role triples (either truth) with this subject.
  std::span<const std::size_t> properties(const std::string& subject) const;

  /// Strict ancestors over true IsA edges.
  std::vector<std::string> ancestors(const std::string& entity) const;
  bool is_ancestor(const std::string& ancestor, const std::string& entity) const;

  /// Entity ids sorted lexicographically. Quantity objects are predicate
  /// names, not entities, and are left out.
  std::span<const std::string> entities() const { return idx_.entities; }
  bool has_entity(const std::string& id) const;
  /// Connected component over all entity-entity triples.
  std::size_t component(const std::string& entity) const;
  /// Connected component over true IsA edges only.
  std::size_t hypernym_tree(const std::string& entity) const;

  std::vector<std::size_t> matching(const TripleFilter& filter) const;
  /// Uniform draw over matching triples, in storage order.
  const Triple& sample_triple(const TripleFilter& filter, Rng& rng) const;

  /// True when every index equals the one rebuilt from triples().
  bool indexes_consistent() const;

 private:
  struct Indexes {
    std::unordered_map<TripleKey, std::size_t> by_key;
    std::unordered_map<std::string, std::vector<std::size_t>> by_subject;
    std::unordered_map<std::string, std::vector<std::size_t>> by_object;
    std::unordered_map<std::string, std::vector<std::size_t>> by_predicate;
    std::unordered_map<std::string, std::vector<std::string>> hypernyms;
    std::unordered_map<std::string, std::vector<std::string>> hyponyms;
    std::unordered_map<std::string, std::vector<std::string>> meronyms;
    std::unordered_map<std::string, std::vector<std::size_t>> properties;
    std::vector<std::string> entities;
    std::unordered_map<std::string, std::size_t> component;
    std::unordered_map<std::string, std::size_t> tree;

    bool operator==(const Indexes&) const = default;
  };

  static Indexes build(const PredicateRegistry& registry, std::span<const Triple> triples);
  void validate() const;
  bool is_entity_object(const Triple& t) const;

  const PredicateRegistry* registry_;
  std::vector<Triple> triples_;
  SurfaceForms surfaces_;
  Indexes idx_;
};

}  // namespace kbr
