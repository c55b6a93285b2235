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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kbr/generation.hpp"

namespace kbr {

/// One entity's quantity fact and exactly K true member facts.
struct CountingSet {
  std::string entity;
  std::string member_predicate;
  Triple quantity;
  std::vector<Triple> members;  // canonical key order
  int K = 0;
};

/// Sets for every true quantity fact whose member count matches. Mismatched
/// entities are skipped and described in `warnings` when given.
std::vector<CountingSet> build_counting_sets(const KnowledgeBase& kb,
                                             std::vector<std::string>* warnings = nullptr);

enum class Ordering { Random, Ascending, Descending };
std::string_view to_string(Ordering o);
Ordering ordering_from_string(std::string_view name);

/// Canonical triple string -> probability the model assigns to "true".
using ProbabilityMap = std::unordered_map<std::string, double>;
ProbabilityMap read_probability_map(std::istream& in, std::string_view origin);
ProbabilityMap read_probability_map(const std::filesystem::path& path);
void write_probability_map(std::ostream& out, const ProbabilityMap& probs);

struct CountingOptions {
  bool distractors = true;
  // Adds a positive/negative pair with no member facts in context.
  bool include_k0 = false;
  Ordering ordering = Ordering::Random;
  // Required for the ascending/descending orderings.
  const ProbabilityMap* probabilities = nullptr;
};

class CountingGenerator {
 public:
  explicit CountingGenerator(const KnowledgeBase& kb);

  /// 2K-1 examples: for k in [1, K-1] a true and a false hypothesis with k
  /// member facts in context, then one false hypothesis with all K. The
  /// quantity fact is always in context; the other members are withheld.
  std::vector<Example> expand(const CountingSet& set, std::size_t set_index,
                              std::uint64_t seed, const CountingOptions& options) const;

  /// Appends a same-predicate quantity/member distractor pair from another
  /// entity plus one random member fact and one random quantity fact.
  void add_distractors(Example& example, const CountingSet& set, Rng& rng) const;

  const std::vector<CountingSet>& sets() const { return sets_; }

 private:
  std::vector<Triple> ordered_members(const CountingSet& set,
                                      const CountingOptions& options) const;

  const KnowledgeBase* kb_;
  Verbalizer verbalizer_;
  std::vector<CountingSet> sets_;
  // Subjects seen with each member predicate.
  std::unordered_map<std::string, std::vector<std::string>> subjects_by_predicate_;
  std::vector<std::size_t> member_triples_;
  std::vector<std::size_t> quantity_triples_;
};

/// Removes the quantity fact; the label is kept and meta records the drop.
Example drop_quantity_fact(Example example);

/// Expansion restricted by probability order: the k context members are the
/// k lowest (ascending) or highest (descending) probability members.
std::vector<Example> order_by_fact_probability(const CountingGenerator& gen,
                                               const CountingSet& set, std::size_t set_index,
                                               const ProbabilityMap& probs, Ordering direction,
                                               std::uint64_t seed, bool include_k0 = true);

struct CountingDatasetOptions {
  CountingOptions expansion;
  double dev_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
};

/// All sets expanded; sets (not examples) are assigned to splits.
Splits generate_counting_dataset(const KnowledgeBase& kb, const CountingDatasetOptions& options);

/// Every set expanded under `options`, in set order.
std::vector<Example> expand_all(const CountingGenerator& gen, std::uint64_t seed,
                                const CountingOptions& options, Execution exec);

}  // namespace kbr
