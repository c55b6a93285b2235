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

#include <cmath>
#include <sstream>

#include "kbr/beliefs.hpp"
#include "kbr/error.hpp"

using namespace kbr;

namespace {

const KnowledgeBase& whale_kb() {
  static const KnowledgeBase kb(PredicateRegistry::builtin(),
                                {{"whale", "IsA", "mammal", true, {}},
                                 {"whale", "IsA", "fish", false, {}},
                                 {"mammal", "has a", "belly button", true, {}},
                                 {"fish", "has a", "belly button", false, {}}},
                                {});
  return kb;
}

// Hypernyms withheld, properties in context.
Example whale_example() {
  const auto v = whale_kb().verbalizer();
  Example e;
  e.id = "whale";
  e.hypothesis = v.parse_any("A whale has a belly button.");
  e.context = {v.parse_any("A mammal has a belly button.", StatementTag::RelevantProperty),
               v.parse_any("A fish does not have a belly button.",
                           StatementTag::DistractorProperty)};
  e.withheld = {v.parse_any("A whale is a mammal.", StatementTag::RelevantHypernym),
                v.parse_any("A whale is not a fish.", StatementTag::DistractorHypernym)};
  e.label = true;
  return e;
}

std::vector<Triple> many_facts(std::size_t n) {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"e" + std::to_string(i), "IsA", "c" + std::to_string(i % 17), i % 3 != 0, {}});
  }
  return out;
}

}  // namespace

TEST_CASE("perfect beliefs answer the withheld-hypernym example") {
  const auto beliefs = corrupt_beliefs(whale_kb(), 0.0, 1);
  CHECK(beliefs.wrong_count() == 0);
  CHECK(believer_predict(beliefs, whale_example(), whale_kb().registry()) == 1.0);
}

TEST_CASE("wrong beliefs lead systematically to the wrong answer") {
  BeliefTable beliefs;
  beliefs.set({"whale", "IsA", "mammal"}, {true, false, 0.1});
  beliefs.set({"whale", "IsA", "fish"}, {false, true, 0.2});
  CHECK(believer_predict(beliefs, whale_example(), whale_kb().registry()) == 0.0);

  // One belief wrong, the other missing: nothing derivable.
  BeliefTable partial;
  partial.set({"whale", "IsA", "mammal"}, {true, false, 0.3});
  CHECK(believer_predict(partial, whale_example(), whale_kb().registry()) == 0.5);
}

TEST_CASE("conflicting beliefs give 0.5") {
  BeliefTable beliefs;
  beliefs.set({"whale", "IsA", "mammal"}, {true, true, 0.9});
  beliefs.set({"whale", "IsA", "fish"}, {false, true, 0.3});
  // mammal has one, fish does not: the believer holds both hypernyms.
  CHECK(believer_predict(beliefs, whale_example(), whale_kb().registry()) == 0.5);
}

TEST_CASE("context wins over beliefs for stated facts") {
  Example e = whale_example();
  const auto v = whale_kb().verbalizer();
  e.context.push_back(v.parse_any("A whale is a mammal."));
  BeliefTable beliefs;
  beliefs.set({"whale", "IsA", "mammal"}, {true, false, 0.1});
  CHECK(believer_predict(beliefs, e, whale_kb().registry()) == 1.0);
}

TEST_CASE("corruption rates 0 and 1") {
  const auto facts = many_facts(500);
  const auto keep = corrupt_beliefs(facts, 0.0, 4);
  const auto flip = corrupt_beliefs(facts, 1.0, 4);
  CHECK(keep.size() == 500);
  CHECK(keep.wrong_count() == 0);
  CHECK(flip.wrong_count() == 500);
  for (const auto& t : facts) {
    const Belief* k = keep.find(t.key());
    const Belief* f = flip.find(t.key());
    REQUIRE(k != nullptr);
    REQUIRE(f != nullptr);
    CHECK(k->believed == t.truth);
    CHECK(f->believed == !t.truth);
    CHECK(k->confidence > 0.5);
    CHECK(k->confidence <= 1.0);
    CHECK(f->confidence >= 0.0);
    CHECK(f->confidence < 0.5);
    CHECK((k->p_true() >= 0.5) == t.truth);
    CHECK((f->p_true() >= 0.5) == !t.truth);
  }
  CHECK_THROWS_AS(corrupt_beliefs(facts, 1.5, 4), Error);
  CHECK_THROWS_AS(corrupt_beliefs(facts, -0.1, 4), Error);
}

TEST_CASE("flip fraction at rate 0.2 over 10,000 facts is within 3 sigma") {
  const auto table = corrupt_beliefs(many_facts(10000), 0.2, 11);
  // sigma = sqrt(n p (1 - p)) = 40
  const double flips = static_cast<double>(table.wrong_count());
  CHECK(std::fabs(flips - 2000.0) <= 120.0);
}

TEST_CASE("a fact's belief does not depend on the rest of the table") {
  const auto facts = many_facts(300);
  const auto all = corrupt_beliefs(facts, 0.4, 8);
  const std::vector<Triple> some(facts.begin() + 100, facts.begin() + 140);
  const auto part = corrupt_beliefs(some, 0.4, 8);
  for (const auto& t : some) {
    CHECK(part.find(t.key())->confidence == all.find(t.key())->confidence);
  }
  const auto other_seed = corrupt_beliefs(facts, 0.4, 9);
  std::size_t differing = 0;
  for (const auto& t : facts) {
    differing += other_seed.find(t.key())->confidence != all.find(t.key())->confidence;
  }
  CHECK(differing == facts.size());
}

TEST_CASE("belief tables round-trip and validate") {
  const auto table = corrupt_beliefs(many_facts(50), 0.3, 2);
  std::stringstream buf;
  table.write(buf);
  const auto back = BeliefTable::read(buf, "mem");
  REQUIRE(back.size() == table.size());
  for (const auto& key : table.keys()) {
    CHECK(back.find(key)->confidence == table.find(key)->confidence);
    CHECK(back.find(key)->believed == table.find(key)->believed);
  }
  const auto probs = table.probability_map();
  CHECK(probs.size() == 50);
  CHECK(probs.at("e0|IsA|c0") == table.find({"e0", "IsA", "c0"})->p_true());

  BeliefTable t;
  CHECK_THROWS_AS(t.set({"a", "IsA", "b"}, {true, true, 0.2}), Error);   // kept but < 0.5
  CHECK_THROWS_AS(t.set({"a", "IsA", "b"}, {true, false, 0.7}), Error);  // flipped but > 0.5
  CHECK_THROWS_AS(t.set({"a", "IsA", "b"}, {true, true, 1.5}), Error);
  CHECK_THROWS_AS(t.set({"a", "IsA", "b"}, {true, true, 0.5}), Error);
  std::istringstream bad(R"({"fact":"a|IsA|b","truth":true,"believed":true})");
  CHECK_THROWS_WITH_AS(BeliefTable::read(bad, "b.jsonl"), doctest::Contains("b.jsonl:1"),
                       LoadError);
}

TEST_CASE("scope: hypernym, member and quantity facts only") {
  const auto v = whale_kb().verbalizer();
  CHECK(in_belief_scope(v.parse_any("A whale is a mammal.", StatementTag::RelevantHypernym)));
  CHECK(in_belief_scope(v.parse_any("A whale is a mammal.", StatementTag::DistractorHypernym)));
  CHECK_FALSE(
      in_belief_scope(v.parse_any("A mammal has a belly button.", StatementTag::RelevantProperty)));
  CHECK_FALSE(in_belief_scope(Statement::raw("x", StatementTag::RelevantHypernym)));
}
