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

#include <doctest.h>

#include <map>
#include <set>

#include "kbr/controlled.hpp"
#include "kbr/error.hpp"
#include "kbr/synthetic.hpp"
#include "support/brute_force.hpp"

using namespace kbr;

namespace {

const KnowledgeBase& fixture() {
  static const KnowledgeBase kb = [] {
    SyntheticKbOptions o;
    o.trees = 40;
    o.counting_sets_per_predicate = 0;
    return make_synthetic_kb(o);
  }();
  return kb;
}

std::vector<Statement> without_conditions(const std::vector<Statement>& context) {
  std::vector<Statement> out;
  for (const auto& s : context) {
    if (!is_hypernym_tag(s.tag)) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("hand-built rule set follows the firing rule's polarity") {
  const auto& reg = PredicateRegistry::builtin();
  std::vector<Triple> triples = {
      {"toucan", "IsA", "bird", true, {}},   {"parrot", "IsA", "bird", true, {}},
      {"bird", "IsA", "animal", true, {}},   {"fish", "IsA", "animal", true, {}},
      {"toucan", "HasPart", "wing", true, {}}, {"parrot", "HasPart", "beak", true, {}},
      {"salmon", "IsA", "fish", true, {}},   {"salmon", "HasPart", "fin", true, {}},
      {"toucan", "IsA", "fish", false, {}},  {"toucan", "larger than", "parrot", false, {}},
      {"parrot", "larger than", "toucan", true, {}},
  };
  KnowledgeBase kb(reg, triples, {});
  ControlledGenerator gen(kb, 3, 3);
  Rng rng = make_rng(3, 0, 0);
  for (int i = 0; i < 20; ++i) {
    Example e = gen.build("group-1", rng);
    CHECK(testing::brute_force_verdict(e.context, e.hypothesis, reg) ==
          (e.label ? "true" : "false"));
    Example f = gen.flipped(e);
    CHECK(f.label == !e.label);
    CHECK(testing::brute_force_verdict(f.context, f.hypothesis, reg) ==
          (f.label ? "true" : "false"));
  }
  CHECK_THROWS_WITH_AS(gen.build("toucan", rng), doctest::Contains("collides"), GenerationError);
}

TEST_CASE("controlled examples: one true condition, 3-5 false, both polarities, oracle agrees") {
  const auto& kb = fixture();
  ControlledGenerator gen(kb);
  auto examples = gen.generate_pairs(300, 4, Execution::Serial);
  REQUIRE(examples.size() == 600);
  std::set<std::string> kinds_seen;
  for (const auto& e : examples) {
    std::size_t rules = 0, positive_rules = 0, true_conditions = 0, false_conditions = 0;
    std::size_t kb_true = 0;
    for (const auto& s : e.context) {
      if (s.is_rule()) {
        ++rules;
        positive_rules += s.rule().polarity ? 1 : 0;
        CHECK(s.tag == StatementTag::ControlledRule);
        CHECK_FALSE(kb.has_entity(s.rule().group));
        if (kb_holds(kb, {e.hypothesis.fact().subject, s.rule().condition_predicate,
                          s.rule().condition_object}) == true) {
          ++kb_true;
        }
      } else {
        (s.fact().truth ? true_conditions : false_conditions) += 1;
      }
    }
    CHECK(kb_true == 1);
    CHECK(true_conditions == 1);
    CHECK(false_conditions >= 3);
    CHECK(false_conditions <= 5);
    CHECK(rules == true_conditions + false_conditions);
    CHECK(positive_rules >= 1);
    CHECK(positive_rules < rules);

    CHECK(testing::brute_force_verdict(e.context, e.hypothesis, kb.registry()) ==
          (e.label ? "true" : "false"));
    CHECK(testing::brute_force_verdict(without_conditions(e.context), e.hypothesis,
                                       kb.registry()) == "unknown");

    Closure closure(e.context, kb.registry(), std::vector<std::string>{});
    std::size_t rule_steps = 0;
    for (const auto& step : closure.explain(e.hypothesis.fact().key())) {
      rule_steps += step.rule == "rule" ? 1 : 0;
    }
    CHECK(rule_steps == 1);
    for (const auto& k : e.meta.extra["condition_types"]) kinds_seen.insert(k.get<std::string>());
  }
  CHECK(kinds_seen == std::set<std::string>{"hypernyms", "meronyms", "sizes"});
}

TEST_CASE("hypothesis alone carries no label signal") {
  ControlledGenerator gen(fixture());
  auto examples = gen.generate_pairs(500, 8, Execution::Serial);
  std::map<std::string, int> balance;
  for (const auto& e : examples) balance[e.hypothesis.text] += e.label ? 1 : -1;
  for (const auto& [text, b] : balance) CHECK(b == 0);
  // Best hypothesis-only predictor: majority label per hypothesis text.
  std::map<std::string, std::pair<int, int>> counts;
  for (const auto& e : examples) (e.label ? counts[e.hypothesis.text].first : counts[e.hypothesis.text].second)++;
  std::size_t correct = 0;
  for (const auto& [_, c] : counts) correct += static_cast<std::size_t>(std::max(c.first, c.second));
  CHECK(correct * 2 == examples.size());
}

TEST_CASE("group labels cycle through nine values") {
  ControlledGenerator gen(fixture());
  auto examples = gen.generate_pairs(40, 2, Execution::Serial);
  std::set<std::string> groups;
  for (const auto& e : examples) groups.insert(e.meta.extra["group"].get<std::string>());
  CHECK(groups.size() == 9);
}

TEST_CASE("serial and parallel controlled generation agree") {
  ControlledGenerator gen(fixture());
  auto a = gen.generate_pairs(120, 5, Execution::Serial);
  auto b = gen.generate_pairs(120, 5, Execution::Parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_json(a[i]) == to_json(b[i]));
}

TEST_CASE("controlled splits keep hypernym trees disjoint") {
  const auto& kb = fixture();
  ControlledOptions o;
  o.sizes = {600, 100, 100};
  o.seed = 6;
  Splits s = generate_controlled_dataset(kb, o);
  CHECK(s.train.size() == 600);
  CHECK(s.dev.size() == 100);
  CHECK(s.test.size() == 100);
  auto roots = [&](const std::vector<Example>& part) {
    std::set<std::size_t> out;
    for (const auto& e : part) {
      for (const auto& x : example_entities(e, kb.registry())) {
        if (kb.has_entity(x)) out.insert(kb.hypernym_tree(x));
      }
    }
    return out;
  };
  const auto train = roots(s.train);
  for (const auto* part : {&s.dev, &s.test}) {
    for (auto r : roots(*part)) CHECK_FALSE(train.contains(r));
    std::set<std::string> kinds;
    for (const auto& e : *part) {
      for (const auto& k : e.meta.extra["condition_types"]) kinds.insert(k.get<std::string>());
    }
    CHECK(kinds.size() == 3);
    std::size_t t = 0;
    for (const auto& e : *part) t += e.label ? 1 : 0;
    CHECK(t * 2 == part->size());
  }
}

TEST_CASE("controlled generation errors") {
  const auto& reg = PredicateRegistry::builtin();
  SUBCASE("too few distractor conditions") {
    KnowledgeBase kb(reg, {{"a", "IsA", "b", true, {}}, {"a", "HasPart", "c", true, {}}}, {});
    ControlledGenerator gen(kb);
    Rng rng = make_rng(1, 0, 0);
    CHECK_THROWS_WITH_AS(gen.build("group-1", rng),
                         doctest::Contains("insufficient distractor conditions"), GenerationError);
  }
  SUBCASE("single tree") {
    SyntheticKbOptions o;
    o.trees = 1;
    o.counting_sets_per_predicate = 0;
    auto kb = make_synthetic_kb(o);
    ControlledOptions c;
    c.sizes = {20, 10, 10};
    CHECK_THROWS_WITH_AS(generate_controlled_dataset(kb, c), doctest::Contains("two disjoint"),
                         GenerationError);
  }
  SUBCASE("bad range") { CHECK_THROWS_AS(ControlledGenerator(fixture(), 1, 5), Error); }
}
