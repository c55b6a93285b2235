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

#include "kbr/controlled.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "kbr/error.hpp"

namespace kbr {

ControlledGenerator::ControlledGenerator(const KnowledgeBase& kb, int min_distractors,
                                         int max_distractors)
    : kb_(&kb),
      verbalizer_(kb.verbalizer()),
      min_distractors_(min_distractors),
      max_distractors_(max_distractors) {
  if (min_distractors < 2 || max_distractors < min_distractors) {
    // Two false conditions are the least that can carry both polarities.
    throw Error("distractor range must satisfy 2 <= min <= max");
  }
  const auto& reg = kb.registry();
  const auto triples = kb.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (reg.at(t.predicate).condition.empty()) continue;
    conditions_by_component_[kb.component(t.subject)].push_back(i);
    if (t.truth && t.subject != t.object) anchors_.push_back(i);
  }
}

std::string ControlledGenerator::kind_of(const std::string& predicate) const {
  switch (kb_->registry().at(predicate).role) {
    case PredicateRole::Hypernym:
      return "hypernyms";
    case PredicateRole::Meronym:
      return "meronyms";
    case PredicateRole::Size:
      return "sizes";
    default:
      return "other";
  }
}

bool ControlledGenerator::usable_distractor(const std::string& entity,
                                            const Condition& c) const {
  if (c.object == entity) return false;
  if (kb_->registry().at(c.predicate).condition.empty()) return false;
  return kb_holds(*kb_, {entity, c.predicate, c.object}) != true;
}

std::vector<ControlledGenerator::Condition> ControlledGenerator::near_misses(
    const std::string& entity) const {
  const auto& reg = kb_->registry();
  const auto triples = kb_->triples();
  const std::string& isa = reg.hypernym();
  std::vector<Condition> out;
  auto add = [&](Condition c) {
    if (usable_distractor(entity, c) && std::find(out.begin(), out.end(), c) == out.end()) {
      out.push_back(std::move(c));
    }
  };
  // Conditions the KB states false for this entity.
  for (auto i : kb_->by_subject(entity)) {
    const Triple& t = triples[i];
    if (!t.truth && !reg.at(t.predicate).condition.empty()) add({t.predicate, t.object});
  }
  for (const auto& parent : kb_->hypernyms(entity)) {
    // Sibling classes.
    for (const auto& grand : kb_->hypernyms(parent)) {
      for (const auto& aunt : kb_->hyponyms(grand)) {
        if (aunt != parent) add({isa, aunt});
      }
    }
    // Parts of sibling entities.
    for (const auto& sibling : kb_->hyponyms(parent)) {
      if (sibling == entity) continue;
      for (auto i : kb_->by_subject(sibling)) {
        const Triple& t = triples[i];
        if (t.truth && reg.at(t.predicate).role == PredicateRole::Meronym) {
          add({t.predicate, t.object});
        }
      }
    }
  }
  // Inverse size comparisons: Z is larger than E, so E is not larger than Z.
  for (auto i : kb_->by_object(entity)) {
    const Triple& t = triples[i];
    if (t.truth && reg.at(t.predicate).role == PredicateRole::Size) add({t.predicate, t.subject});
  }
  return out;
}

Example ControlledGenerator::build(const std::string& group, Rng& rng) const {
  if (kb_->has_entity(group)) {
    throw GenerationError("group label '" + group + "' collides with a KB entity");
  }
  if (anchors_.empty()) throw GenerationError("KB has no true fact usable as a rule condition");
  const Triple& anchor = kb_->triples()[pick(anchors_, rng)];
  const std::string& entity = anchor.subject;
  const Condition relevant{anchor.predicate, anchor.object};

  const auto wanted = static_cast<std::size_t>(
      min_distractors_ +
      static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_distractors_ -
                                                                   min_distractors_ + 1))));
  auto candidates = near_misses(entity);
  shuffle(candidates, rng);
  std::vector<Condition> distractors;
  for (auto& c : candidates) {
    if (distractors.size() == wanted) break;
    if (c != relevant) distractors.push_back(std::move(c));
  }
  auto pool = conditions_by_component_.find(kb_->component(entity));
  while (distractors.size() < wanted) {
    bool placed = false;
    for (int attempt = 0; attempt < kSlotRetries && !placed && pool != conditions_by_component_.end();
         ++attempt) {
      const Triple& t = kb_->triples()[pick(pool->second, rng)];
      Condition c{t.predicate, t.object};
      if (c == relevant || !usable_distractor(entity, c) ||
          std::find(distractors.begin(), distractors.end(), c) != distractors.end()) {
        continue;
      }
      distractors.push_back(std::move(c));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("insufficient distractor conditions for '" + entity + "': found " +
                            std::to_string(distractors.size()) + " of " +
                            std::to_string(wanted));
    }
  }

  const bool polarity = bernoulli(rng, 0.5);
  std::vector<bool> distractor_polarity(distractors.size());
  for (std::size_t i = 0; i < distractors.size(); ++i) {
    distractor_polarity[i] = bernoulli(rng, 0.5);
  }
  if (std::all_of(distractor_polarity.begin(), distractor_polarity.end(),
                  [&](bool p) { return p == distractor_polarity.front(); })) {
    const auto i = uniform_index(rng, distractor_polarity.size());
    distractor_polarity[i] = !distractor_polarity[i];
  }

  Example e;
  e.hypothesis = verbalizer_.verbalize(Triple{entity, kb_->registry().hypernym(), group, true, {}});
  e.label = polarity;
  e.context.push_back(verbalizer_.verbalize(
      ConditionalRule{relevant.predicate, relevant.object, group, polarity}));
  e.context.push_back(verbalizer_.verbalize(
      Triple{entity, relevant.predicate, relevant.object, true, {}},
      StatementTag::RelevantHypernym));
  nlohmann::json kinds = nlohmann::json::array({kind_of(relevant.predicate)});
  for (std::size_t i = 0; i < distractors.size(); ++i) {
    const Condition& c = distractors[i];
    e.context.push_back(
        verbalizer_.verbalize(ConditionalRule{c.predicate, c.object, group, distractor_polarity[i]}));
    e.context.push_back(verbalizer_.verbalize(Triple{entity, c.predicate, c.object, false, {}},
                                              StatementTag::DistractorHypernym));
    kinds.push_back(kind_of(c.predicate));
  }
  shuffle(e.context, rng);
  if (!passes_gate(e.context, e.hypothesis, e.label, kb_->registry())) {
    throw GenerationError("rule set for '" + entity + "' fails the oracle");
  }
  e.meta.kind = "controlled";
  e.meta.skills = {kind_of(relevant.predicate)};
  e.meta.extra["group"] = group;
  e.meta.extra["condition_types"] = std::move(kinds);
  e.meta.extra["relevant_condition"] = canonical(TripleKey{entity, relevant.predicate,
                                                           relevant.object});
  return e;
}

Example ControlledGenerator::flipped(const Example& example) const {
  const auto it = std::find_if(example.context.begin(), example.context.end(),
                               [](const Statement& s) {
                                 return s.tag == StatementTag::RelevantHypernym && s.is_fact();
                               });
  if (it == example.context.end()) {
    throw GenerationError("example " + example.id + " has no relevant condition to flip");
  }
  const Triple& condition = it->fact();
  Example out = example;
  bool found = false;
  for (auto& s : out.context) {
    if (!s.is_rule()) continue;
    const ConditionalRule& r = s.rule();
    if (r.condition_predicate == condition.predicate && r.condition_object == condition.object) {
      ConditionalRule flip = r;
      flip.polarity = !flip.polarity;
      s = verbalizer_.verbalize(flip);
      found = true;
    }
  }
  if (!found) throw GenerationError("example " + example.id + " has no firing rule");
  out.label = !example.label;
  return out;
}

std::vector<Example> ControlledGenerator::generate_pairs(std::size_t pairs, std::uint64_t seed,
                                                         Execution exec) const {
  std::vector<Example> out;
  std::unordered_set<std::string> seen;
  std::size_t taken = 0;
  std::size_t next_index = 0;
  std::string last_error;
  for (int round = 0; round < 8 && taken < pairs; ++round) {
    const std::size_t slots = (pairs - taken) * 3 / 2 + 16;
    auto results = run_slots(slots, next_index, exec, [&](std::size_t i) {
      Rng rng = make_rng(seed, streams::kControlled, i);
      Example a = build("group-" + std::to_string(1 + i % 9), rng);
      Example b = flipped(a);
      a.id = make_id("controlled", i, "a");
      b.id = make_id("controlled", i, "b");
      a.meta.seed = b.meta.seed = derive_seed(seed, streams::kControlled, i);
      return std::vector<Example>{std::move(a), std::move(b)};
    });
    if (!results.last_error.empty()) last_error = results.last_error;
    auto batch = take_unique_groups(results, pairs, seen, taken);
    next_index += slots;
    if (batch.empty()) break;
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  if (taken < pairs) {
    throw GenerationError("KB supports only " + std::to_string(taken) +
                          " unique controlled pairs, " + std::to_string(pairs) + " requested" +
                          (last_error.empty() ? "" : "; last failure: " + last_error));
  }
  return out;
}

Splits split_controlled(std::vector<Example> examples, const KnowledgeBase& kb,
                        const SplitTargets& targets, std::uint64_t seed) {
  std::set<std::size_t> components;
  for (const auto& e : examples) components.insert(kb.component(e.hypothesis.fact().subject));
  if (components.size() < 2) {
    throw GenerationError("controlled split needs at least two disjoint hypernym trees, found " +
                          std::to_string(components.size()));
  }
  Rng rng = make_rng(seed, streams::kSplit, 1);
  return split_by_groups(
      std::move(examples), targets,
      [&](const Example& e) {
        return std::to_string(kb.component(e.hypothesis.fact().subject));
      },
      rng);
}

Splits generate_controlled_dataset(const KnowledgeBase& kb, const ControlledOptions& options) {
  const auto& s = options.sizes;
  const std::size_t total = s.train + s.dev + s.test;
  const std::size_t pairs = (total + 1) / 2 + total / 40 + 8;
  ControlledGenerator gen(kb, options.min_distractors, options.max_distractors);
  return split_controlled(gen.generate_pairs(pairs, options.seed, options.exec), kb, s,
                          options.seed);
}

}  // namespace kbr
