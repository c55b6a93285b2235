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

#include "kbr/reasoner.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

namespace kbr {

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::True:
      return "True";
    case Truth::False:
      return "False";
    case Truth::Unknown:
      break;
  }
  return "Unknown";
}

ContradictionError::ContradictionError(Triple first, Triple second)
    : Error("contradictory statements: " + describe(first) + " and " + describe(second)),
      first_(std::move(first)),
      second_(std::move(second)) {}

nlohmann::json Verdict::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : derivation) {
    nlohmann::json j{{"rule", s.rule},
                     {"conclusion", describe(s.conclusion)},
                     {"premises", s.premises}};
    if (s.statement) j["statement"] = *s.statement;
    steps.push_back(std::move(j));
  }
  return {{"value", std::string(to_string(value))}, {"derivation", std::move(steps)}};
}

Closure::Closure(std::span<const Statement> statements, const PredicateRegistry& registry,
                 std::span<const std::string> extra_entities)
    : registry_(&registry), hypernym_(registry.hypernym()) {
  std::set<std::string> universe(extra_entities.begin(), extra_entities.end());
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const Statement& s = statements[i];
    if (s.is_raw()) {
      throw ParseError("reasoner cannot interpret statement '" + s.text + "'");
    }
    if (s.is_rule()) {
      rules_.emplace_back(s.rule(), i);
      continue;
    }
    const Triple& t = s.fact();
    universe.insert(t.subject);
    if (registry.at(t.predicate).role != PredicateRole::Quantity) universe.insert(t.object);
  }
  universe_.assign(universe.begin(), universe.end());

  // All given facts go in before any rule fires so conflicts among the
  // inputs are reported against the inputs themselves.
  for (std::size_t i = 0; i < statements.size(); ++i) {
    if (statements[i].is_fact()) add(statements[i].fact(), "given", {}, i);
  }
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const Triple t = queue_[head];
    fire(t);
  }
  queue_.clear();
}

void Closure::add(Triple t, std::string rule, std::vector<std::size_t> premises,
                  std::optional<std::size_t> statement) {
  t.source.clear();
  auto key = t.key();
  if (auto it = facts_.find(key); it != facts_.end()) {
    if (it->second.truth == t.truth) return;
    throw ContradictionError(steps_[it->second.step].conclusion, t);
  }
  facts_.emplace(key, Entry{t.truth, steps_.size()});
  by_subject_[t.subject].push_back(key);
  by_object_[t.object].push_back(key);
  steps_.push_back({std::move(rule), t, std::move(premises), statement});
  queue_.push_back(std::move(t));
}

std::size_t Closure::step_of(const std::string& s, const std::string& p,
                             const std::string& o) const {
  return facts_.at(TripleKey{s, p, o}).step;
}

void Closure::fire(const Triple& t) {
  const Predicate& pred = registry_->at(t.predicate);
  const std::size_t self = step_of(t.subject, t.predicate, t.object);

  if (pred.role == PredicateRole::Hypernym && t.truth) {
    // t is (A IsA B); everything B inherits passes to A.
    const auto keys = by_subject_[t.object];
    for (const auto& k : keys) {
      if (!registry_->at(k.predicate).inheritable()) continue;
      const Entry e = facts_.at(k);
      add({t.subject, k.predicate, k.object, e.truth, {}}, "inherit", {self, e.step}, {});
    }
  }
  if (pred.inheritable()) {
    // t is (B p X); pass it down to every A with (A IsA B).
    const auto keys = by_object_[t.subject];
    for (const auto& k : keys) {
      if (k.predicate != hypernym_) continue;
      const Entry e = facts_.at(k);
      if (!e.truth) continue;
      add({k.subject, t.predicate, t.object, t.truth, {}}, "inherit", {e.step, self}, {});
    }
  }
  if (pred.role == PredicateRole::Meronym) {
    if (t.truth) {
      const auto keys = by_subject_[t.object];
      for (const auto& k : keys) {
        if (k.predicate != t.predicate) continue;
        const Entry e = facts_.at(k);
        add({t.subject, t.predicate, k.object, e.truth, {}}, "part-of", {self, e.step}, {});
      }
    }
    const auto keys = by_object_[t.subject];
    for (const auto& k : keys) {
      if (k.predicate != t.predicate) continue;
      const Entry e = facts_.at(k);
      if (!e.truth) continue;
      add({k.subject, t.predicate, t.object, t.truth, {}}, "part-of", {e.step, self}, {});
    }
  }
  if (t.truth) {
    for (const auto& [rule, index] : rules_) {
      if (rule.condition_predicate == t.predicate && rule.condition_object == t.object) {
        add({t.subject, hypernym_, rule.group, rule.polarity, {}}, "rule", {self}, index);
      }
    }
  }
  if (pred.role == PredicateRole::Member && t.truth) check_counts(t.object, t.predicate);
  if (pred.role == PredicateRole::Quantity && t.truth) check_counts(t.subject, t.object);
}

void Closure::check_counts(const std::string& entity, const std::string& member_predicate) {
  std::vector<std::string> members;
  std::vector<std::size_t> member_steps;
  for (const auto& k : by_object_[entity]) {
    if (k.predicate != member_predicate) continue;
    const Entry& e = facts_.at(k);
    if (!e.truth) continue;
    members.push_back(k.subject);
    member_steps.push_back(e.step);
  }
  const auto quantity_keys = by_subject_[entity];
  for (const auto& q : quantity_keys) {
    const Predicate& qp = registry_->at(q.predicate);
    if (qp.role != PredicateRole::Quantity || q.object != member_predicate) continue;
    const Entry quantity = facts_.at(q);
    if (!quantity.truth) continue;
    const auto count = static_cast<std::size_t>(qp.count);
    if (members.size() > count) {
      throw ContradictionError(steps_[quantity.step].conclusion,
                               steps_[member_steps[count]].conclusion);
    }
    if (members.size() < count) continue;
    std::vector<std::size_t> premises{quantity.step};
    premises.insert(premises.end(), member_steps.begin(), member_steps.end());
    for (const auto& other : universe_) {
      if (other == entity || std::find(members.begin(), members.end(), other) != members.end()) {
        continue;
      }
      add({other, member_predicate, entity, false, {}}, "count", premises, {});
    }
  }
}

std::optional<bool> Closure::truth(const TripleKey& key) const {
  auto it = facts_.find(key);
  if (it == facts_.end()) return std::nullopt;
  return it->second.truth;
}

Truth Closure::evaluate(const Triple& hypothesis) const {
  auto t = truth(hypothesis.key());
  if (!t) return Truth::Unknown;
  return *t == hypothesis.truth ? Truth::True : Truth::False;
}

std::vector<DerivationStep> Closure::explain(const TripleKey& key) const {
  auto it = facts_.find(key);
  if (it == facts_.end()) return {};
  std::vector<DerivationStep> out;
  std::unordered_map<std::size_t, std::size_t> renumbered;
  // Post-order walk so premises always precede their conclusion.
  std::vector<std::pair<std::size_t, bool>> stack{{it->second.step, false}};
  while (!stack.empty()) {
    auto [step, expanded] = stack.back();
    stack.pop_back();
    if (renumbered.contains(step)) continue;
    if (!expanded) {
      stack.emplace_back(step, true);
      for (auto p : steps_[step].premises) {
        if (!renumbered.contains(p)) stack.emplace_back(p, false);
      }
      continue;
    }
    DerivationStep copy = steps_[step];
    for (auto& p : copy.premises) p = renumbered.at(p);
    renumbered.emplace(step, out.size());
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<Triple> Closure::facts() const {
  std::vector<Triple> out;
  out.reserve(facts_.size());
  for (const auto& [key, entry] : facts_) {
    out.push_back({key.subject, key.predicate, key.object, entry.truth, {}});
  }
  std::sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.subject, a.predicate, a.object) < std::tie(b.subject, b.predicate, b.object);
  });
  return out;
}

Verdict entail(std::span<const Statement> statements, const Triple& hypothesis,
               const PredicateRegistry& registry) {
  const std::string subject[] = {hypothesis.subject};
  Closure closure(statements, registry, subject);
  Verdict v;
  v.value = closure.evaluate(hypothesis);
  if (v.value != Truth::Unknown) v.derivation = closure.explain(hypothesis.key());
  return v;
}

}  // namespace kbr
