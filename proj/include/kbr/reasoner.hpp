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

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/error.hpp"
#include "kbr/predicates.hpp"
#include "kbr/statement.hpp"

namespace kbr {

enum class Truth { True, False, Unknown };

std::string_view to_string(Truth t);

/// Two statements that assert opposite truths for the same triple.
class ContradictionError : public Error {
 public:
  ContradictionError(Triple first, Triple second);
  const Triple& first() const { return first_; }
  const Triple& second() const { return second_; }

 private:
  Triple first_;
  Triple second_;
};

/// One applied inference. `premises` index earlier steps of the same
/// derivation; `statement` cites the input statement used directly (a given
/// fact or a conditional rule).
struct DerivationStep {
  std::string rule;
  Triple conclusion;
  std::vector<std::size_t> premises;
  std::optional<std::size_t> statement;
};

struct Verdict {
  Truth value = Truth::Unknown;
  // Steps in dependency order; the last one concludes the hypothesis.
  std::vector<DerivationStep> derivation;

  nlohmann::json to_json() const;
};

/// Closed-world fixpoint over facts and conditional rules.
///
/// Inference rules:
///   inherit   (A IsA B, T) + (B p X, v)   => (A p X, v)  p hypernym or property role
///   part-of   (A p B, T)   + (B p C, v)   => (A p C, v)  p meronym role
///   rule      (E cp co, T) + [if cp co then group, pol] => (E IsA group, pol)
///   count     (E has-K mp, T) + K distinct (X mp E, T)
///             => (Y mp E, F) for every other Y in the universe
/// The universe is every entity mentioned by a fact (quantity objects
/// excluded) plus any extra entities supplied by the caller, typically the
/// hypothesis subject. Opposite truths for one triple raise
/// ContradictionError.
class Closure {
 public:
  Closure(std::span<const Statement> statements, const PredicateRegistry& registry,
          std::span<const std::string> extra_entities = {});

  std::optional<bool> truth(const TripleKey& key) const;
  Truth evaluate(const Triple& hypothesis) const;
  /// Derivation backtrace of a derived key; empty when not derived.
  std::vector<DerivationStep> explain(const TripleKey& key) const;
  std::size_t size() const { return facts_.size(); }
  /// Every derived fact, for comparisons in tests.
  std::vector<Triple> facts() const;

 private:
  struct Entry {
    bool truth;
    std::size_t step;
  };

  void add(Triple t, std::string rule, std::vector<std::size_t> premises,
           std::optional<std::size_t> statement);
  void fire(const Triple& t);
  void check_counts(const std::string& entity, const std::string& member_predicate);
  std::size_t step_of(const std::string& s, const std::string& p, const std::string& o) const;

  const PredicateRegistry* registry_;
  std::string hypernym_;
  std::vector<std::pair<ConditionalRule, std::size_t>> rules_;
  std::vector<std::string> universe_;
  std::vector<DerivationStep> steps_;
  std::unordered_map<TripleKey, Entry> facts_;
  std::unordered_map<std::string, std::vector<TripleKey>> by_subject_;
  std::unordered_map<std::string, std::vector<TripleKey>> by_object_;
  std::vector<Triple> queue_;
};

/// entail(statements, hypothesis). Raw statements are rejected.
Verdict entail(std::span<const Statement> statements, const Triple& hypothesis,
               const PredicateRegistry& registry);

}  // namespace kbr
