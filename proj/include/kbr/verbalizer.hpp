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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kbr/predicates.hpp"
#include "kbr/statement.hpp"

namespace kbr {

/// Display form for each entity id ("the beatles" -> "The Beatles").
class SurfaceForms {
 public:
  /// Keeps the first surface seen for an id.
  void record(const std::string& id, std::string_view surface);
  const std::string& surface(const std::string& id) const;
  std::size_t size() const { return forms_.size(); }

 private:
  std::unordered_map<std::string, std::string> forms_;
};

/// Template expansion and its inverse.
///
/// Parsing tries every template of every predicate. When several match, the
/// one with the most literal characters wins ("A whale has a belly button."
/// is `has a`, not `has` with object "a belly button"); a tie between
/// distinct readings is an ambiguity error.
class Verbalizer {
 public:
  explicit Verbalizer(const PredicateRegistry& registry,
                      const SurfaceForms* surfaces = nullptr);

  const PredicateRegistry& registry() const { return *registry_; }

  Statement verbalize(const Triple& triple,
                      StatementTag tag = StatementTag::Plain) const;
  Statement verbalize(const ConditionalRule& rule) const;
  /// Text of the affirmative reading regardless of the triple's truth.
  std::string affirmative_text(const Triple& triple) const;

  /// Parses a fact statement. Throws ParseError on no match or ambiguity.
  Triple parse(std::string_view text) const;
  ConditionalRule parse_rule(std::string_view text) const;
  /// Fact or rule; raw statement when nothing matches.
  Statement parse_any(std::string_view text, StatementTag tag = StatementTag::Plain) const;

 private:
  struct Segment {
    bool slot = false;
    bool subject_slot = false;
    std::string literal;
  };
  struct Pattern {
    std::vector<Segment> segments;
    std::size_t literal_length = 0;
    const Predicate* predicate = nullptr;
    bool truth = true;
  };
  struct Match {
    const Pattern* pattern;
    std::string subject;
    std::string object;
  };

  static Pattern compile(std::string_view text);
  static void match(const Pattern& p, std::string_view text, std::vector<Match>& out);
  std::string render(std::string_view tmpl, const std::string& subject,
                     const std::string& object) const;
  std::string object_surface(const Predicate& p, const std::string& object) const;
  std::optional<std::string> object_from_surface(const Predicate& p,
                                                 std::string_view surface) const;
  std::vector<Match> best_matches(const std::vector<Pattern>& patterns,
                                  std::string_view text) const;

  const PredicateRegistry* registry_;
  const SurfaceForms* surfaces_;
  std::vector<Pattern> fact_patterns_;
  std::vector<Pattern> condition_patterns_;
  // count noun -> member predicate, for quantity facts.
  std::unordered_map<std::string, std::string> singular_nouns_;
  std::unordered_map<std::string, std::string> plural_nouns_;
};

}  // namespace kbr
