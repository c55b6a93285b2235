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

#include <string>
#include <string_view>
#include <variant>

#include "kbr/triple.hpp"

namespace kbr {

/// Structural role of a statement inside an example.
enum class StatementTag {
  RelevantHypernym,
  RelevantProperty,
  DistractorProperty,
  DistractorHypernym,
  SubjectDistractor,
  PredicateDistractor,
  QuantityFact,
  MemberFact,
  DistractorQuantityFact,
  DistractorMemberFact,
  ControlledRule,
  Plain,
};

std::string_view to_string(StatementTag tag);
StatementTag tag_from_string(std::string_view name);
bool is_distractor(StatementTag tag);
/// Facts a model is expected to hold implicitly: hypernyms and rule conditions.
bool is_hypernym_tag(StatementTag tag);

/// "If something <condition>, then it is (not) a <group>."
struct ConditionalRule {
  std::string condition_predicate;
  std::string condition_object;
  std::string group;
  bool polarity = true;

  bool operator==(const ConditionalRule&) const = default;
};

/// A verbalized triple or rule. Raw holds text that matched no template; it
/// is carried through for model clients but the reasoner rejects it.
struct Statement {
  struct Raw {
    bool operator==(const Raw&) const = default;
  };

  std::string text;
  StatementTag tag = StatementTag::Plain;
  std::variant<Raw, Triple, ConditionalRule> content;

  bool is_fact() const { return std::holds_alternative<Triple>(content); }
  bool is_rule() const { return std::holds_alternative<ConditionalRule>(content); }
  bool is_raw() const { return std::holds_alternative<Raw>(content); }
  const Triple& fact() const { return std::get<Triple>(content); }
  const ConditionalRule& rule() const { return std::get<ConditionalRule>(content); }

  static Statement raw(std::string text, StatementTag tag = StatementTag::Plain) {
    return Statement{std::move(text), tag, Raw{}};
  }
};

}  // namespace kbr
