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

#include "kbr/counting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"

namespace kbr {

namespace {

// Slot index of (set, k) inside the counting seed stream.
std::size_t slot_of(std::size_t set_index, int k) {
  return set_index * 8 + static_cast<std::size_t>(k);
}

bool is_member_of(const CountingSet& set, const std::string& subject) {
  return std::any_of(set.members.begin(), set.members.end(),
                     [&](const Triple& t) { return t.subject == subject; });
}

// Context alone must give `alone`; context plus withheld must give the label.
bool counting_gate(const Example& e, Truth alone, const PredicateRegistry& registry) {
  const Triple& h = e.hypothesis.fact();
  const std::string extra[] = {h.subject};
  try {
    if (Closure(e.context, registry, extra).evaluate(h) != alone) return false;
    return Closure(e.all_statements(), registry, extra).evaluate(h) ==
           (e.label ? Truth::True : Truth::False);
  } catch (const ContradictionError&) {
    return false;
  }
}

}  // namespace

std::vector<CountingSet> build_counting_sets(const KnowledgeBase& kb,
                                             std::vector<std::string>* warnings) {
  const auto& reg = kb.registry();
  std::vector<CountingSet> out;
  for (const auto& t : kb.triples()) {
    const Predicate& p = reg.at(t.predicate);
    if (p.role != PredicateRole::Quantity || !t.truth) continue;
    CountingSet set{t.subject, t.object, t, {}, p.count};
    for (auto i : kb.by_object(t.subject)) {
      const Triple& m = kb.triples()[i];
      if (m.truth && m.predicate == t.object) set.members.push_back(m);
    }
    if (set.members.size() != static_cast<std::size_t>(p.count)) {
      if (warnings != nullptr) {
        warnings->push_back("skipping '" + t.subject + "': " + t.predicate + " " + t.object +
                            " but " + std::to_string(set.members.size()) + " member facts");
      }
      continue;
    }
    std::sort(set.members.begin(), set.members.end(),
              [](const Triple& a, const Triple& b) { return a.key() < b.key(); });
    out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end(), [](const CountingSet& a, const CountingSet& b) {
    return std::tie(a.entity, a.member_predicate) < std::tie(b.entity, b.member_predicate);
  });
  return out;
}

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::Random:
      return "random";
    case Ordering::Ascending:
      return "ascending";
    case Ordering::Descending:
      return "descending";
  }
  return "random";
}

Ordering ordering_from_string(std::string_view name) {
  if (name == "random") return Ordering::Random;
  if (name == "ascending") return Ordering::Ascending;
  if (name == "descending") return Ordering::Descending;
  throw Error("unknown ordering '" + std::string(name) + "'");
}

ProbabilityMap read_probability_map(std::istream& in, std::string_view origin) {
  ProbabilityMap out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(n) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      const std::string fact = canonical(parse_canonical(j.at("fact").get<std::string>()));
      const double p = j.at("p_true").get<double>();
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw LoadError("p_true outside [0, 1]");
      out[fact] = p;
    } catch (const std::exception& e) {
      throw LoadError(where + e.what());
    }
  }
  return out;
}

ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return read_probability_map(in, path.string());
}

void write_probability_map(std::ostream& out, const ProbabilityMap& probs) {
  std::map<std::string, double> sorted(probs.begin(), probs.end());
  for (const auto& [fact, p] : sorted) {
    out << nlohmann::json{{"fact", fact}, {"p_true", p}}.dump() << '\n';
  }
}

CountingGenerator::CountingGenerator(const KnowledgeBase& kb)
    : kb_(&kb), verbalizer_(kb.verbalizer()), sets_(build_counting_sets(kb)) {
  const auto& reg = kb.registry();
  const auto triples = kb.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    const PredicateRole role = reg.at(t.predicate).role;
    if (role == PredicateRole::Member) {
      auto& subjects = subjects_by_predicate_[t.predicate];
      if (std::find(subjects.begin(), subjects.end(), t.subject) == subjects.end()) {
        subjects.push_back(t.subject);
      }
      if (t.truth) member_triples_.push_back(i);
    } else if (role == PredicateRole::Quantity && t.truth) {
      quantity_triples_.push_back(i);
    }
  }
  for (auto& [_, subjects] : subjects_by_predicate_) std::sort(subjects.begin(), subjects.end());
}

std::vector<Triple> CountingGenerator::ordered_members(const CountingSet& set,
                                                       const CountingOptions& options) const {
  std::vector<Triple> members = set.members;
  if (options.ordering == Ordering::Random) return members;
  if (options.probabilities == nullptr) {
    throw Error("ordering '" + std::string(to_string(options.ordering)) +
                "' needs fact probabilities");
  }
  std::vector<std::pair<double, Triple>> keyed;
  for (auto& m : members) {
    auto it = options.probabilities->find(canonical(m));
    if (it == options.probabilities->end()) {
      throw Error("no probability for fact '" + canonical(m) + "'");
    }
    keyed.emplace_back(it->second, std::move(m));
  }
  const bool ascending = options.ordering == Ordering::Ascending;
  std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    return ascending ? a.first < b.first : a.first > b.first;
  });
  members.clear();
  for (auto& [_, m] : keyed) members.push_back(std::move(m));
  return members;
}

void CountingGenerator::add_distractors(Example& example, const CountingSet& set,
                                        Rng& rng) const {
  const auto triples = kb_->triples();
  std::vector<std::size_t> same_predicate;
  for (auto i : quantity_triples_) {
    const Triple& q = triples[i];
    if (q.object != set.member_predicate || q.subject == set.entity) continue;
    for (auto j : kb_->by_object(q.subject)) {
      if (triples[j].truth && triples[j].predicate == set.member_predicate) {
        same_predicate.push_back(i);
        break;
      }
    }
  }
  if (same_predicate.empty()) {
    throw GenerationError("no same-predicate distractor entity for '" + set.entity + "'");
  }

  const Example base = example;
  const Truth alone = base.withheld.empty() && !base.label ? Truth::False : Truth::Unknown;
  for (int attempt = 0; attempt < kSlotRetries; ++attempt) {
    const Triple& other_quantity = triples[pick(same_predicate, rng)];
    const std::string& other = other_quantity.subject;
    std::vector<const Triple*> other_members;
    for (auto j : kb_->by_object(other)) {
      const Triple& m = triples[j];
      if (m.truth && m.predicate == set.member_predicate) other_members.push_back(&m);
    }
    const Triple& other_member = *pick(other_members, rng);
    std::vector<std::size_t> unrelated_members;
    for (auto i : member_triples_) {
      if (triples[i].object != set.entity && triples[i].object != other) {
        unrelated_members.push_back(i);
      }
    }
    std::vector<std::size_t> unrelated_quantities;
    for (auto i : quantity_triples_) {
      if (triples[i].subject != set.entity && triples[i].subject != other) {
        unrelated_quantities.push_back(i);
      }
    }
    if (unrelated_members.empty() || unrelated_quantities.empty()) continue;
    const Triple& random_member = triples[pick(unrelated_members, rng)];
    const Triple& random_quantity = triples[pick(unrelated_quantities, rng)];

    Example trial = base;
    trial.context.push_back(
        verbalizer_.verbalize(other_quantity, StatementTag::DistractorQuantityFact));
    trial.context.push_back(verbalizer_.verbalize(other_member, StatementTag::DistractorMemberFact));
    trial.context.push_back(verbalizer_.verbalize(random_member, StatementTag::DistractorMemberFact));
    trial.context.push_back(
        verbalizer_.verbalize(random_quantity, StatementTag::DistractorQuantityFact));
    if (!counting_gate(trial, alone, kb_->registry())) continue;
    trial.meta.flags[flags::kWithDistractors] = true;
    example = std::move(trial);
    return;
  }
  throw GenerationError("cannot place counting distractors for '" + set.entity + "' after " +
                        std::to_string(kSlotRetries) + " attempts");
}

std::vector<Example> CountingGenerator::expand(const CountingSet& set, std::size_t set_index,
                                               std::uint64_t seed,
                                               const CountingOptions& options) const {
  if (set.K < 1 || set.members.size() != static_cast<std::size_t>(set.K)) {
    throw GenerationError("counting set for '" + set.entity + "' is malformed");
  }
  const std::vector<Triple> members = ordered_members(set, options);
  std::vector<std::string> negatives;
  if (auto it = subjects_by_predicate_.find(set.member_predicate);
      it != subjects_by_predicate_.end()) {
    for (const auto& s : it->second) {
      if (s != set.entity && !is_member_of(set, s)) negatives.push_back(s);
    }
  }
  if (negatives.empty()) {
    throw GenerationError("no negative subject for '" + set.entity + "' with predicate '" +
                          set.member_predicate + "'");
  }

  std::string prefix = "counting";
  if (options.ordering != Ordering::Random) prefix += "-" + std::string(to_string(options.ordering));
  auto probability = [&](const Triple& t) { return options.probabilities->at(canonical(t)); };

  std::vector<Example> out;
  for (int k = options.include_k0 ? 0 : 1; k <= set.K; ++k) {
    const std::size_t slot = slot_of(set_index, k);
    Rng rng = make_rng(seed, streams::kCounting, slot);
    std::vector<Triple> order = members;
    if (options.ordering == Ordering::Random) shuffle(order, rng);
    std::vector<Triple> in_context(order.begin(), order.begin() + k);
    std::vector<Triple> remaining(order.begin() + k, order.end());
    // Canonical order before the shuffle: the same member sets give the same
    // example whichever ordering selected them.
    for (auto* part : {&in_context, &remaining}) {
      std::sort(part->begin(), part->end(),
                [](const Triple& a, const Triple& b) { return a.key() < b.key(); });
    }

    Example base;
    base.context.push_back(verbalizer_.verbalize(set.quantity, StatementTag::QuantityFact));
    for (const auto& m : in_context) {
      base.context.push_back(verbalizer_.verbalize(m, StatementTag::MemberFact));
    }
    for (const auto& m : remaining) {
      base.withheld.push_back(verbalizer_.verbalize(m, StatementTag::MemberFact));
    }
    base.meta.kind = "counting";
    base.meta.skills = {"counting"};
    base.meta.k = k;
    base.meta.K = set.K;
    base.meta.c = static_cast<double>(k) / static_cast<double>(set.K);
    base.meta.ordering = std::string(to_string(options.ordering));
    base.meta.seed = derive_seed(seed, streams::kCounting, slot);
    base.meta.extra["entity"] = set.entity;
    base.meta.extra["member_predicate"] = set.member_predicate;

    std::vector<Example> produced;
    if (k < set.K) {
      // Random order picks any remaining member; ordered variants use the
      // least probable one so both orders share the same choice rule.
      const Triple* positive = nullptr;
      if (options.ordering == Ordering::Random) {
        positive = &remaining[uniform_index(rng, remaining.size())];
      } else {
        positive = &*std::min_element(remaining.begin(), remaining.end(),
                                      [&](const Triple& a, const Triple& b) {
                                        const double pa = probability(a);
                                        const double pb = probability(b);
                                        return pa < pb || (pa == pb && a.key() < b.key());
                                      });
      }
      Example p = base;
      p.id = make_id(prefix, set_index, "k" + std::to_string(k) + "-p");
      p.hypothesis = verbalizer_.verbalize(*positive);
      p.label = true;
      produced.push_back(std::move(p));
    }
    Example n = base;
    n.id = make_id(prefix, set_index, "k" + std::to_string(k) + "-n");
    n.hypothesis = verbalizer_.verbalize(
        Triple{pick(negatives, rng), set.member_predicate, set.entity, true, {}});
    n.label = false;
    produced.push_back(std::move(n));

    for (auto& e : produced) {
      const Truth alone = k == set.K ? Truth::False : Truth::Unknown;
      if (options.distractors) {
        add_distractors(e, set, rng);
      } else if (!counting_gate(e, alone, kb_->registry())) {
        throw GenerationError("counting example " + e.id + " fails the oracle");
      }
      shuffle(e.context, rng);
      out.push_back(std::move(e));
    }
  }
  return out;
}

Example drop_quantity_fact(Example example) {
  auto it = std::find_if(example.context.begin(), example.context.end(), [](const Statement& s) {
    return s.tag == StatementTag::QuantityFact;
  });
  if (it == example.context.end() || example.meta.flag(flags::kQuantityDropped)) {
    throw Error("example " + example.id + " has no quantity fact to drop");
  }
  example.meta.extra["dropped_quantity"] = it->text;
  example.context.erase(it);
  example.meta.flags[flags::kQuantityDropped] = true;
  return example;
}

std::vector<Example> order_by_fact_probability(const CountingGenerator& gen,
                                               const CountingSet& set, std::size_t set_index,
                                               const ProbabilityMap& probs, Ordering direction,
                                               std::uint64_t seed, bool include_k0) {
  if (direction == Ordering::Random) throw Error("probability order must be ascending or descending");
  CountingOptions options;
  options.ordering = direction;
  options.probabilities = &probs;
  options.include_k0 = include_k0;
  return gen.expand(set, set_index, seed, options);
}

std::vector<Example> expand_all(const CountingGenerator& gen, std::uint64_t seed,
                                const CountingOptions& options, Execution exec) {
  const auto& sets = gen.sets();
  std::vector<std::vector<Example>> per_set(sets.size());
  for_each_index(sets.size(), exec,
                 [&](std::size_t i) { per_set[i] = gen.expand(sets[i], i, seed, options); });
  std::vector<Example> out;
  for (auto& v : per_set) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

Splits generate_counting_dataset(const KnowledgeBase& kb, const CountingDatasetOptions& options) {
  for (double f : {options.dev_fraction, options.test_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw Error("split fractions must lie in [0, 1]");
  }
  if (options.dev_fraction + options.test_fraction > 1.0) {
    throw Error("dev and test fractions exceed 1");
  }
  CountingGenerator gen(kb);
  const auto& sets = gen.sets();
  std::vector<std::vector<Example>> per_set(sets.size());
  for_each_index(sets.size(), options.exec, [&](std::size_t i) {
    per_set[i] = gen.expand(sets[i], i, options.seed, options.expansion);
  });

  std::vector<std::size_t> order(sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(options.seed, streams::kSplit, 2);
  shuffle(order, rng);
  const auto n = static_cast<double>(sets.size());
  const auto n_test = static_cast<std::size_t>(std::llround(options.test_fraction * n));
  const auto n_dev = static_cast<std::size_t>(std::llround(options.dev_fraction * n));

  Splits out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& part = r < n_test ? out.test : r < n_test + n_dev ? out.dev : out.train;
    const char* name = r < n_test ? "test" : r < n_test + n_dev ? "dev" : "train";
    for (auto& e : per_set[order[r]]) {
      e.meta.split = name;
      part.push_back(std::move(e));
    }
  }
  for (auto* part : {&out.train, &out.dev, &out.test}) {
    std::sort(part->begin(), part->end(),
              [](const Example& a, const Example& b) { return a.id < b.id; });
  }
  return out;
}

}  // namespace kbr
