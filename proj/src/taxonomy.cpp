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

#include "kbr/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "kbr/error.hpp"

namespace kbr {

namespace {

const Statement* find_tagged(const Example& e, StatementTag tag) {
  for (const auto& s : e.context) {
    if (s.tag == tag && s.is_fact()) return &s;
  }
  for (const auto& s : e.withheld) {
    if (s.tag == tag && s.is_fact()) return &s;
  }
  return nullptr;
}

bool uses_key(const Example& e, const TripleKey& key) {
  if (e.hypothesis.is_fact() && e.hypothesis.fact().key() == key) return true;
  for (const auto& s : e.context) {
    if (s.is_fact() && s.fact().key() == key) return true;
  }
  return false;
}

}  // namespace

TaxonomyGenerator::TaxonomyGenerator(const KnowledgeBase& kb)
    : kb_(&kb), verbalizer_(kb.verbalizer()), isa_(kb.registry().hypernym()) {
  const auto& reg = kb.registry();
  const auto triples = kb.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (!t.truth) continue;
    const PredicateRole role = reg.at(t.predicate).role;
    if (role == PredicateRole::Hypernym) {
      for (auto j : kb.properties(t.object)) {
        if (triples[j].truth) {
          hypernym_anchors_.push_back(i);
          break;
        }
      }
    } else if (role == PredicateRole::Meronym) {
      for (auto j : kb.by_subject(t.object)) {
        if (triples[j].truth && triples[j].predicate == t.predicate) {
          meronym_anchors_.push_back(i);
          break;
        }
      }
    }
  }
  for (const auto& entity : kb.entities()) {
    const auto component = kb.component(entity);
    if (!kb.hyponyms(entity).empty()) classes_by_component_[component].push_back(entity);
    for (auto j : kb.by_object(entity)) {
      const Triple& t = triples[j];
      if (t.truth && reg.at(t.predicate).role == PredicateRole::Meronym) {
        wholes_by_component_[component].push_back(entity);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < triples.size(); ++i) {
    triples_by_component_[kb.component(triples[i].subject)].push_back(i);
  }
}

Example TaxonomyGenerator::build_positive(Rng& rng) const {
  if (hypernym_anchors_.empty()) {
    throw GenerationError("no true IsA triple whose object has a true property");
  }
  const Triple& edge = kb_->triples()[pick(hypernym_anchors_, rng)];
  std::vector<std::size_t> props;
  for (auto j : kb_->properties(edge.object)) {
    if (kb_->triples()[j].truth) props.push_back(j);
  }
  const Triple& prop = kb_->triples()[pick(props, rng)];
  return assemble({edge.subject, edge.object, prop.predicate, prop.object}, false, rng);
}

Example TaxonomyGenerator::build_meronym_positive(Rng& rng) const {
  if (meronym_anchors_.empty()) throw GenerationError("KB has no part-of chain of length 2");
  const Triple& edge = kb_->triples()[pick(meronym_anchors_, rng)];
  std::vector<std::size_t> next;
  for (auto j : kb_->by_subject(edge.object)) {
    const Triple& t = kb_->triples()[j];
    if (t.truth && t.predicate == edge.predicate && t.object != edge.subject) next.push_back(j);
  }
  if (next.empty()) throw GenerationError("part-of chain from '" + edge.subject + "' loops back");
  const Triple& tail = kb_->triples()[pick(next, rng)];
  return assemble({edge.subject, edge.object, edge.predicate, tail.object}, true, rng);
}

Example TaxonomyGenerator::build_negative(const Example& positive, Rng& rng) const {
  return assemble_negative(positive, rng);
}

Example TaxonomyGenerator::build_meronym_negative(const Example& positive, Rng& rng) const {
  return assemble_negative(positive, rng);
}

Example TaxonomyGenerator::assemble(const Anchor& a, bool meronym, Rng& rng) const {
  const std::string& link = meronym ? a.predicate : isa_;
  const Triple hypothesis{a.subject, a.predicate, a.object, true, {}};
  if (kb_holds(*kb_, hypothesis.key()) == false) {
    throw GenerationError("hypothesis " + describe(hypothesis) + " is false in the KB");
  }

  const auto component = kb_->component(a.subject);
  const auto& by_component = meronym ? wholes_by_component_ : classes_by_component_;
  auto pool_it = by_component.find(component);
  if (pool_it == by_component.end()) {
    throw GenerationError("no DistractorProperty candidate near '" + a.subject + "'");
  }
  std::optional<std::string> distractor;
  for (int attempt = 0; attempt < kSlotRetries && !distractor; ++attempt) {
    const std::string& x = pick(pool_it->second, rng);
    if (x == a.subject || x == a.parent || x == a.object) continue;
    if (kb_holds(*kb_, {a.subject, link, x}) == true) continue;
    if (kb_holds(*kb_, {x, a.predicate, a.object}) == true) continue;
    distractor = x;
  }
  if (!distractor) {
    throw GenerationError("cannot construct DistractorProperty for '" + a.subject + "' after " +
                          std::to_string(kSlotRetries) + " attempts");
  }

  Example e;
  e.hypothesis = verbalizer_.verbalize(hypothesis);
  e.label = true;
  e.context = {
      verbalizer_.verbalize(Triple{a.subject, link, a.parent, true, {}},
                            StatementTag::RelevantHypernym),
      verbalizer_.verbalize(Triple{a.parent, a.predicate, a.object, true, {}},
                            StatementTag::RelevantProperty),
      verbalizer_.verbalize(Triple{*distractor, a.predicate, a.object, false, {}},
                            StatementTag::DistractorProperty),
      verbalizer_.verbalize(Triple{a.subject, link, *distractor, false, {}},
                            StatementTag::DistractorHypernym),
  };
  if (!passes_gate(e.context, e.hypothesis, e.label, kb_->registry())) {
    throw GenerationError("core statements for " + describe(hypothesis) + " fail the oracle");
  }
  add_side_distractors(e, a.subject, a.predicate, rng);
  shuffle(e.context, rng);
  e.meta.kind = meronym ? "meronymy" : "taxonomy";
  e.meta.skills = {meronym ? "meronyms" : "hypernyms"};
  return e;
}

Example TaxonomyGenerator::assemble_negative(const Example& positive, Rng& rng) const {
  const Statement* rh = find_tagged(positive, StatementTag::RelevantHypernym);
  const Statement* dp = find_tagged(positive, StatementTag::DistractorProperty);
  if (rh == nullptr || dp == nullptr) {
    throw GenerationError("positive example " + positive.id + " lacks relevant/distractor facts");
  }
  const std::string& link = rh->fact().predicate;
  const std::string& parent = rh->fact().object;        // B
  const std::string& x = dp->fact().subject;             // X
  const std::string& predicate = dp->fact().predicate;   // p
  const std::string& object = dp->fact().object;         // P
  const std::string& anchor = rh->fact().subject;        // A

  std::vector<std::string> candidates;
  for (auto j : kb_->by_object(x)) {
    const Triple& t = kb_->triples()[j];
    if (!t.truth || t.predicate != link) continue;
    const std::string& s = t.subject;
    if (s == anchor || s == parent || s == object) continue;
    if (kb_holds(*kb_, {s, predicate, object}) == true) continue;
    if (kb_holds(*kb_, {s, link, parent}) == true) continue;
    candidates.push_back(s);
  }
  if (candidates.empty()) {
    throw GenerationError("no hyponym of '" + x + "' can serve as a negative subject");
  }
  const std::string subject = pick(candidates, rng);

  Example e;
  e.hypothesis = verbalizer_.verbalize(Triple{subject, predicate, object, true, {}});
  e.label = false;
  e.context = {
      verbalizer_.verbalize(Triple{subject, link, x, true, {}}, StatementTag::RelevantHypernym),
      verbalizer_.verbalize(Triple{x, predicate, object, false, {}},
                            StatementTag::RelevantProperty),
      verbalizer_.verbalize(Triple{parent, predicate, object, true, {}},
                            StatementTag::DistractorProperty),
      verbalizer_.verbalize(Triple{subject, link, parent, false, {}},
                            StatementTag::DistractorHypernym),
  };
  if (!passes_gate(e.context, e.hypothesis, e.label, kb_->registry())) {
    throw GenerationError("core statements for negative of " + positive.id + " fail the oracle");
  }
  add_side_distractors(e, subject, predicate, rng);
  shuffle(e.context, rng);
  e.meta.kind = positive.meta.kind;
  e.meta.skills = positive.meta.skills;
  return e;
}

void TaxonomyGenerator::add_side_distractors(Example& e, const std::string& subject,
                                             const std::string& predicate, Rng& rng) const {
  const auto triples = kb_->triples();
  auto place = [&](std::vector<std::size_t> pool, StatementTag tag, const char* slot) {
    std::erase_if(pool, [&](std::size_t i) { return uses_key(e, triples[i].key()); });
    if (pool.empty()) {
      throw GenerationError(std::string("no ") + slot + " candidate for '" + subject + "'");
    }
    for (int attempt = 0; attempt < kSlotRetries; ++attempt) {
      auto trial = e.context;
      trial.push_back(verbalizer_.verbalize(triples[pick(pool, rng)], tag));
      if (passes_gate(trial, e.hypothesis, e.label, kb_->registry())) {
        e.context = std::move(trial);
        return;
      }
    }
    throw GenerationError(std::string("cannot place ") + slot + " for '" + subject + "' after " +
                          std::to_string(kSlotRetries) + " attempts");
  };

  const auto own = kb_->by_subject(subject);
  place({own.begin(), own.end()}, StatementTag::SubjectDistractor, "SubjectDistractor");

  std::vector<std::size_t> same_predicate;
  auto it = triples_by_component_.find(kb_->component(subject));
  if (it != triples_by_component_.end()) {
    for (auto i : it->second) {
      if (triples[i].predicate == predicate && triples[i].subject != subject) {
        same_predicate.push_back(i);
      }
    }
  }
  place(std::move(same_predicate), StatementTag::PredicateDistractor, "PredicateDistractor");
}

std::vector<Example> TaxonomyGenerator::generate_pairs(std::size_t pairs, std::uint64_t seed,
                                                       Execution exec, bool meronym) const {
  const std::uint64_t stream = meronym ? streams::kMeronymy : streams::kTaxonomy;
  const std::string prefix = meronym ? "meronymy" : "taxonomy";
  std::vector<Example> out;
  std::unordered_set<std::string> seen;
  std::size_t taken = 0;
  std::size_t next_index = 0;
  std::string last_error;
  for (int round = 0; round < 8 && taken < pairs; ++round) {
    const std::size_t slots = (pairs - taken) * 3 / 2 + 16;
    auto results = run_slots(slots, next_index, exec, [&](std::size_t i) {
      Rng rng = make_rng(seed, stream, i);
      Example pos = meronym ? build_meronym_positive(rng) : build_positive(rng);
      Example neg = meronym ? build_meronym_negative(pos, rng) : build_negative(pos, rng);
      pos.id = make_id(prefix, i, "p");
      neg.id = make_id(prefix, i, "n");
      pos.meta.seed = neg.meta.seed = derive_seed(seed, stream, i);
      return std::vector<Example>{std::move(pos), std::move(neg)};
    });
    if (!results.last_error.empty()) last_error = results.last_error;
    auto batch = take_unique_groups(results, pairs, seen, taken);
    next_index += slots;
    if (batch.empty()) break;  // exhausted
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  if (taken < pairs) {
    throw GenerationError("KB supports only " + std::to_string(taken) + " unique " + prefix +
                          " pairs, " + std::to_string(pairs) + " requested" +
                          (last_error.empty() ? "" : "; last failure: " + last_error));
  }
  return out;
}

std::vector<Example> apply_ablation_policy(std::vector<Example> dataset,
                                           const AblationPolicy& policy, std::uint64_t seed) {
  for (double f : {policy.remove_hypernyms, policy.remove_distractors}) {
    if (!(f >= 0.0 && f <= 1.0)) throw Error("ablation fractions must lie in [0, 1]");
  }
  const std::size_t n = dataset.size();
  Rng rng = make_rng(seed, streams::kAblation, 0);
  auto chosen = [&](double fraction) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    order.resize(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    return order;
  };
  const auto hypernym_rows = chosen(policy.remove_hypernyms);
  const auto distractor_rows = chosen(policy.remove_distractors);

  for (auto i : hypernym_rows) {
    Example& e = dataset[i];
    std::vector<Statement> kept;
    for (auto& s : e.context) {
      (is_hypernym_tag(s.tag) ? e.withheld : kept).push_back(std::move(s));
    }
    e.context = std::move(kept);
    e.meta.flags[flags::kHypernymsRemoved] = true;
  }
  for (auto i : distractor_rows) {
    Example& e = dataset[i];
    auto drop = [](const Statement& s) { return is_distractor(s.tag); };
    std::erase_if(e.context, drop);
    std::erase_if(e.withheld, drop);
    e.meta.flags[flags::kDistractorsRemoved] = true;
  }
  return dataset;
}

std::vector<Example> hypothesis_only_examples(const KnowledgeBase& kb,
                                              const std::unordered_set<std::string>& allowed,
                                              std::size_t count, std::uint64_t seed) {
  if (count % 2 != 0) throw GenerationError("hypothesis-only count must be even");
  if (count == 0) return {};
  const std::string isa = kb.registry().hypernym();
  const auto triples = kb.triples();
  const Verbalizer verbalizer = kb.verbalizer();

  std::vector<std::size_t> edges;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (t.truth && t.predicate == isa && allowed.contains(t.subject) &&
        allowed.contains(t.object)) {
      edges.push_back(i);
    }
  }
  std::unordered_map<std::size_t, std::vector<std::string>> classes;
  for (const auto& entity : kb.entities()) {
    if (allowed.contains(entity) && !kb.hyponyms(entity).empty()) {
      classes[kb.component(entity)].push_back(entity);
    }
  }

  Rng rng = make_rng(seed, streams::kHypothesisOnly, 0);
  shuffle(edges, rng);
  std::vector<Example> out;
  std::set<TripleKey> used;
  for (auto i : edges) {
    if (out.size() == count) break;
    const Triple& edge = triples[i];
    if (used.contains(edge.key())) continue;
    // Prefer a false IsA the KB states; otherwise a non-ancestor class nearby.
    std::vector<std::string> wrong;
    for (auto j : kb.by_subject(edge.subject)) {
      const Triple& t = triples[j];
      if (!t.truth && t.predicate == isa && allowed.contains(t.object)) wrong.push_back(t.object);
    }
    if (wrong.empty()) {
      for (const auto& c : classes[kb.component(edge.subject)]) {
        if (c != edge.subject && kb_holds(kb, {edge.subject, isa, c}) != true) wrong.push_back(c);
      }
    }
    std::erase_if(wrong, [&](const std::string& y) { return used.contains({edge.subject, isa, y}); });
    if (wrong.empty()) continue;
    const std::string y = pick(wrong, rng);
    used.insert(edge.key());
    used.insert({edge.subject, isa, y});

    const std::size_t pair = out.size() / 2;
    for (bool truth : {true, false}) {
      const Triple fact{edge.subject, isa, truth ? edge.object : y, truth, {}};
      Example e;
      e.id = make_id("hyponly", pair, truth ? "t" : "f");
      e.hypothesis = verbalizer.verbalize(fact.with_truth(true));
      e.withheld = {verbalizer.verbalize(fact, StatementTag::RelevantHypernym)};
      e.label = truth;
      e.meta.kind = "hypothesis-only";
      e.meta.skills = {"hypernyms"};
      e.meta.seed = seed;
      out.push_back(std::move(e));
    }
  }
  if (out.size() < count) {
    throw GenerationError("insufficient KB coverage for hypothesis-only examples: " +
                          std::to_string(out.size()) + " of " + std::to_string(count));
  }
  return out;
}

Splits split_disjoint(std::vector<Example> examples, const SplitTargets& targets,
                      const PredicateRegistry& registry, std::uint64_t seed) {
  // Union examples that share any entity.
  std::vector<std::size_t> parent(examples.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    for (const auto& entity : example_entities(examples[i], registry)) {
      auto [it, inserted] = owner.emplace(entity, i);
      if (!inserted) {
        auto a = find(i);
        auto b = find(it->second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::unordered_map<std::string, std::string> group;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    group.emplace(examples[i].id, examples[find(i)].id);
  }
  Rng rng = make_rng(seed, streams::kSplit, 0);
  return split_by_groups(
      std::move(examples), targets, [&](const Example& e) { return group.at(e.id); }, rng);
}

Example make_selectivity_variant(const Example& example, const std::vector<std::string>& lexicon,
                                 const Verbalizer& verbalizer, Rng& rng) {
  if (lexicon.empty()) throw Error("selectivity lexicon is empty");
  if (!example.hypothesis.is_fact()) {
    throw Error("example " + example.id + " has no structured hypothesis subject");
  }
  Example out = example;
  Triple t = example.hypothesis.fact();
  t.subject = normalize_entity(pick(lexicon, rng));
  out.hypothesis = verbalizer.verbalize(t, example.hypothesis.tag);
  out.meta.flags[flags::kSelectivity] = true;
  return out;
}

Splits generate_taxonomy_dataset(const KnowledgeBase& kb, const TaxonomyOptions& options) {
  const auto& s = options.sizes;
  const std::size_t total = s.train + s.dev + s.test;
  // A little slack so that whole components can be trimmed into place.
  const std::size_t pairs = (total + 1) / 2 + total / 40 + 8;
  TaxonomyGenerator gen(kb);
  auto examples = gen.generate_pairs(pairs, options.seed, options.exec);
  Splits splits = split_disjoint(std::move(examples), s, kb.registry(), options.seed);
  splits.train = apply_ablation_policy(std::move(splits.train), options.ablation, options.seed);

  std::unordered_set<std::string> allowed;
  for (const auto& e : splits.train) {
    for (auto& entity : example_entities(e, kb.registry())) allowed.insert(std::move(entity));
  }
  for (const auto* part : {&splits.dev, &splits.test}) {
    for (const auto& e : *part) {
      for (const auto& entity : example_entities(e, kb.registry())) allowed.erase(entity);
    }
  }
  auto extra = hypothesis_only_examples(kb, allowed, options.hypothesis_only, options.seed);
  for (auto& e : extra) {
    e.meta.split = "train";
    splits.train.push_back(std::move(e));
  }
  return splits;
}

std::vector<Example> generate_meronymy_testset(const KnowledgeBase& kb, std::size_t count,
                                               std::uint64_t seed, Execution exec) {
  if (count % 2 != 0) throw GenerationError("meronymy count must be even");
  TaxonomyGenerator gen(kb);
  auto examples = gen.generate_pairs(count / 2, seed, exec, true);
  for (auto& e : examples) e.meta.split = "test";
  return examples;
}

}  // namespace kbr
