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
#include <string>
#include <unordered_map>
#include <vector>

#include "kbr/generation.hpp"
#include "kbr/verbalizer.hpp"

namespace kbr {

struct ControlledOptions {
  SplitTargets sizes{8000, 1000, 1000};
  // Number of false conditions per rule set, inclusive range.
  int min_distractors = 3;
  int max_distractors = 5;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
};

/// Rule sets over imaginary "group-N" labels. Each example carries one rule
/// whose condition holds for the target entity and several whose conditions
/// do not; the hypothesis "E is a group-N" takes the polarity of the rule
/// that fires. Condition facts are tagged as hypernym-like implicit facts.
class ControlledGenerator {
 public:
  ControlledGenerator(const KnowledgeBase& kb, int min_distractors = 3, int max_distractors = 5);

  /// One rule set for the entity picked by `rng`; `group` names the label.
  Example build(const std::string& group, Rng& rng) const;

  /// Same rule set with the firing rule's polarity reversed.
  Example flipped(const Example& example) const;

  /// `pairs` twin pairs, ids "controlled-NNNNNNN-a|b"; group-N cycles 1..9.
  std::vector<Example> generate_pairs(std::size_t pairs, std::uint64_t seed,
                                      Execution exec) const;

 private:
  struct Condition {
    std::string predicate;
    std::string object;
    bool operator==(const Condition&) const = default;
  };

  std::vector<Condition> near_misses(const std::string& entity) const;
  bool usable_distractor(const std::string& entity, const Condition& c) const;
  std::string kind_of(const std::string& predicate) const;

  const KnowledgeBase* kb_;
  Verbalizer verbalizer_;
  int min_distractors_;
  int max_distractors_;
  // True triples whose predicate has a condition template, by subject.
  std::vector<std::size_t> anchors_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> conditions_by_component_;
};

/// Splits by connected component of the target entity so that dev/test
/// entities come from hypernym trees that never appear in train.
Splits split_controlled(std::vector<Example> examples, const KnowledgeBase& kb,
                        const SplitTargets& targets, std::uint64_t seed);

Splits generate_controlled_dataset(const KnowledgeBase& kb, const ControlledOptions& options);

}  // namespace kbr
