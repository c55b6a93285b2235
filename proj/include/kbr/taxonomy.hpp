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
#include <unordered_set>
#include <vector>

#include "kbr/generation.hpp"
#include "kbr/verbalizer.hpp"

namespace kbr {

/// Hypernymy examples: "A is a B" + "B has P" entails "A has P", plus four
/// distractors. Positive and negative examples come in pairs.
class TaxonomyGenerator {
 public:
  explicit TaxonomyGenerator(const KnowledgeBase& kb);

  Example build_positive(Rng& rng) const;
  Example build_negative(const Example& positive, Rng& rng) const;

  /// Same construction over part-of chains ("A has part B", "B has part C").
  Example build_meronym_positive(Rng& rng) const;
  Example build_meronym_negative(const Example& positive, Rng& rng) const;

  /// `pairs` unique positive/negative pairs, ids "<prefix>-NNNNNNN-p|n".
  std::vector<Example> generate_pairs(std::size_t pairs, std::uint64_t seed, Execution exec,
                                      bool meronym = false) const;

  const KnowledgeBase& kb() const { return *kb_; }

 private:
  struct Anchor {
    std::string subject;      // A
    std::string parent;       // B
    std::string predicate;    // p
    std::string object;       // P
  };

  Example assemble(const Anchor& anchor, bool meronym, Rng& rng) const;
  Example assemble_negative(const Example& positive, Rng& rng) const;
  void add_side_distractors(Example& e, const std::string& subject, const std::string& predicate,
                            Rng& rng) const;

  const KnowledgeBase* kb_;
  Verbalizer verbalizer_;
  std::string isa_;
  // (A IsA B) edges whose B carries a true property.
  std::vector<std::size_t> hypernym_anchors_;
  // (A p B) meronym edges whose B has a true outgoing edge of the same p.
  std::vector<std::size_t> meronym_anchors_;
  // Entities with at least one true incoming IsA (resp. meronym) edge, per component.
  std::unordered_map<std::size_t, std::vector<std::string>> classes_by_component_;
  std::unordered_map<std::size_t, std::vector<std::string>> wholes_by_component_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> triples_by_component_;
};

struct AblationPolicy {
  double remove_hypernyms = 0.5;
  double remove_distractors = 0.2;
};

/// Moves hypernym statements to withheld in round(p*n) examples and drops
/// every distractor from round(q*n) examples, each chosen uniformly.
std::vector<Example> apply_ablation_policy(std::vector<Example> dataset,
                                           const AblationPolicy& policy, std::uint64_t seed);

/// Context-free hypernym examples: true/false pairs sharing a subject, using
/// only entities in `allowed`. `count` must be even.
std::vector<Example> hypothesis_only_examples(const KnowledgeBase& kb,
                                              const std::unordered_set<std::string>& allowed,
                                              std::size_t count, std::uint64_t seed);

/// Partition with no entity shared between train and dev/test.
Splits split_disjoint(std::vector<Example> examples, const SplitTargets& targets,
                      const PredicateRegistry& registry, std::uint64_t seed);

inline const std::vector<std::string>& default_nonsense_lexicon() {
  static const std::vector<std::string> words = {"foo", "blah", "ya", "qux", "aranglopa",
                                                 "foltopia", "cakophon", "baz", "garply"};
  return words;
}

/// Hypothesis subject swapped for a nonsense word; context and label kept.
Example make_selectivity_variant(const Example& example, const std::vector<std::string>& lexicon,
                                 const Verbalizer& verbalizer, Rng& rng);

struct TaxonomyOptions {
  SplitTargets sizes{30906, 1288, 1288};
  AblationPolicy ablation;
  std::size_t hypothesis_only = 2864;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
};

/// Full pipeline: pairs, disjoint splits, train ablation, hypothesis-only
/// additions to train.
Splits generate_taxonomy_dataset(const KnowledgeBase& kb, const TaxonomyOptions& options);

/// Zero-shot part-of test set; no train split.
std::vector<Example> generate_meronymy_testset(const KnowledgeBase& kb, std::size_t count,
                                               std::uint64_t seed, Execution exec);

}  // namespace kbr
