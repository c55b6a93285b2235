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

// Pieces shared by the dataset generators.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kbr/example.hpp"
#include "kbr/kb.hpp"
#include "kbr/parallel.hpp"
#include "kbr/reasoner.hpp"

namespace kbr {

inline constexpr int kSlotRetries = 20;

/// What the KB itself says about a triple under the reasoner's rules
/// (hypernym chains, inherited properties, part-of chains); nullopt when
/// the KB is silent.
std::optional<bool> kb_holds(const KnowledgeBase& kb, const TripleKey& key);

/// Candidate acceptance test used while assembling an example: the full
/// context must give `label`, the context without hypernym-tagged
/// statements must give Unknown, nothing may contradict, and the hypothesis
/// text may not appear in the context.
bool passes_gate(std::span<const Statement> context, const Statement& hypothesis, bool label,
                 const PredicateRegistry& registry);

/// Runs `build(index)` for each slot, in parallel or serially. Each call
/// gets its own seed so both modes emit identical results. A GenerationError
/// leaves that slot empty; the last message is kept for reporting.
struct SlotResults {
  std::vector<std::vector<Example>> slots;
  std::string last_error;
};
SlotResults run_slots(std::size_t count, std::size_t first_index, Execution exec,
                      const std::function<std::vector<Example>(std::size_t)>& build);

/// Serial merge: keeps slot groups whose hypothesis keys are new, until
/// `limit` groups are taken.
std::vector<Example> take_unique_groups(SlotResults& results, std::size_t limit,
                                        std::unordered_set<std::string>& seen,
                                        std::size_t& taken);

/// Dataset split into named parts.
struct Splits {
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test;
};

struct SplitTargets {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
};

/// Assigns whole groups (examples with equal `group_of` keys) to splits by
/// largest remaining deficit. Each split must land within 10% of its target;
/// oversized splits are then trimmed back in pairs of consecutive ids.
Splits split_by_groups(std::vector<Example> examples, const SplitTargets& targets,
                       const std::function<std::string(const Example&)>& group_of, Rng& rng);

/// Entity ids mentioned by any fact of the example, hypothesis included.
std::vector<std::string> example_entities(const Example& e, const PredicateRegistry& registry);

}  // namespace kbr
