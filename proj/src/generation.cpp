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

#include "kbr/generation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "kbr/error.hpp"

namespace kbr {

std::optional<bool> kb_holds(const KnowledgeBase& kb, const TripleKey& key) {
  const Predicate* p = kb.registry().find(key.predicate);
  if (p == nullptr) return std::nullopt;
  if (p->role == PredicateRole::Hypernym) {
    if (kb.is_ancestor(key.object, key.subject)) return true;
    return kb.truth_of(key);
  }
  if (p->role == PredicateRole::Property) {
    if (auto own = kb.truth_of(key)) return own;
    for (const auto& ancestor : kb.ancestors(key.subject)) {
      if (auto inherited = kb.truth_of({ancestor, key.predicate, key.object})) return inherited;
    }
    return std::nullopt;
  }
  if (p->role == PredicateRole::Meronym) {
    std::set<std::string> seen{key.subject};
    std::vector<std::string> frontier{key.subject};
    std::optional<bool> negative;
    while (!frontier.empty()) {
      std::string node = std::move(frontier.back());
      frontier.pop_back();
      for (auto i : kb.by_subject(node)) {
        const Triple& t = kb.triples()[i];
        if (t.predicate != key.predicate) continue;
        if (t.object == key.object) {
          if (t.truth) return true;
          negative = false;
          continue;
        }
        if (t.truth && seen.insert(t.object).second) frontier.push_back(t.object);
      }
    }
    return negative;
  }
  return kb.truth_of(key);
}

bool passes_gate(std::span<const Statement> context, const Statement& hypothesis, bool label,
                 const PredicateRegistry& registry) {
  for (const auto& s : context) {
    if (s.text == hypothesis.text) return false;
  }
  const Triple& h = hypothesis.fact();
  const std::string extra[] = {h.subject};
  std::vector<Statement> implicit;
  for (const auto& s : context) {
    if (!is_hypernym_tag(s.tag)) implicit.push_back(s);
  }
  try {
    if (Closure(context, registry, extra).evaluate(h) != (label ? Truth::True : Truth::False)) {
      return false;
    }
    return Closure(implicit, registry, extra).evaluate(h) == Truth::Unknown;
  } catch (const ContradictionError&) {
    return false;
  }
}

SlotResults run_slots(std::size_t count, std::size_t first_index, Execution exec,
                      const std::function<std::vector<Example>(std::size_t)>& build) {
  SlotResults out;
  out.slots.resize(count);
  std::vector<std::string> errors(count);
  for_each_index(count, exec, [&](std::size_t i) {
    try {
      out.slots[i] = build(first_index + i);
    } catch (const GenerationError& e) {
      errors[i] = e.what();
    }
  });
  for (auto it = errors.rbegin(); it != errors.rend(); ++it) {
    if (!it->empty()) {
      out.last_error = *it;
      break;
    }
  }
  return out;
}

std::vector<Example> take_unique_groups(SlotResults& results, std::size_t limit,
                                        std::unordered_set<std::string>& seen,
                                        std::size_t& taken) {
  std::vector<Example> out;
  for (auto& group : results.slots) {
    if (taken >= limit) break;
    if (group.empty()) continue;
    bool fresh = true;
    for (const auto& e : group) {
      const std::string key =
          e.hypothesis.is_fact() ? canonical(e.hypothesis.fact()) : e.hypothesis.text;
      if (seen.contains(key)) fresh = false;
    }
    if (!fresh) continue;
    for (auto& e : group) {
      seen.insert(e.hypothesis.is_fact() ? canonical(e.hypothesis.fact()) : e.hypothesis.text);
      out.push_back(std::move(e));
    }
    ++taken;
  }
  return out;
}

std::vector<std::string> example_entities(const Example& e, const PredicateRegistry& registry) {
  std::set<std::string> out;
  auto visit = [&](const Statement& s) {
    if (s.is_fact()) {
      const Triple& t = s.fact();
      out.insert(t.subject);
      if (registry.at(t.predicate).role != PredicateRole::Quantity) out.insert(t.object);
    } else if (s.is_rule()) {
      out.insert(s.rule().condition_object);
    }
  };
  visit(e.hypothesis);
  for (const auto& s : e.context) visit(s);
  for (const auto& s : e.withheld) visit(s);
  return {out.begin(), out.end()};
}

Splits split_by_groups(std::vector<Example> examples, const SplitTargets& targets,
                       const std::function<std::string(const Example&)>& group_of, Rng& rng) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < examples.size(); ++i) groups[group_of(examples[i])].push_back(i);

  struct Group {
    const std::vector<std::size_t>* members;
    std::uint64_t tie;
  };
  std::vector<Group> order;
  for (const auto& [_, members] : groups) order.push_back({&members, rng()});
  std::sort(order.begin(), order.end(), [](const Group& a, const Group& b) {
    if (a.members->size() != b.members->size()) return a.members->size() > b.members->size();
    return a.tie < b.tie;
  });

  const std::size_t target[3] = {targets.train, targets.dev, targets.test};
  std::vector<std::size_t> assigned[3];
  std::size_t size[3] = {0, 0, 0};
  for (const auto& g : order) {
    int best = -1;
    double best_deficit = 0;
    for (int s = 0; s < 3; ++s) {
      if (target[s] == 0) continue;
      const double deficit = (static_cast<double>(target[s]) - static_cast<double>(size[s])) /
                             static_cast<double>(target[s]);
      if (best < 0 || deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    if (best < 0) throw GenerationError("all split targets are zero");
    assigned[best].insert(assigned[best].end(), g.members->begin(), g.members->end());
    size[best] += g.members->size();
  }

  for (int s = 0; s < 3; ++s) {
    if (target[s] == 0) continue;
    const double low = 0.9 * static_cast<double>(target[s]);
    if (static_cast<double>(size[s]) < low) {
      throw GenerationError("entity partition infeasible within 10% tolerance: achieved train=" +
                            std::to_string(size[0]) + " dev=" + std::to_string(size[1]) +
                            " test=" + std::to_string(size[2]) + " for targets train=" +
                            std::to_string(target[0]) + " dev=" + std::to_string(target[1]) +
                            " test=" + std::to_string(target[2]));
    }
  }

  static const char* kNames[3] = {"train", "dev", "test"};
  Splits out;
  std::vector<Example>* parts[3] = {&out.train, &out.dev, &out.test};
  for (int s = 0; s < 3; ++s) {
    auto& part = *parts[s];
    for (auto i : assigned[s]) part.push_back(std::move(examples[i]));
    std::sort(part.begin(), part.end(),
              [](const Example& a, const Example& b) { return a.id < b.id; });
    // Pairs share a group and sit next to each other in id order.
    while (part.size() > target[s] && part.size() >= 2) part.resize(part.size() - 2);
    for (auto& e : part) e.meta.split = kNames[s];
  }
  return out;
}

}  // namespace kbr
