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
#include <sstream>

#include "kbr/counting.hpp"
#include "kbr/error.hpp"
#include "kbr/synthetic.hpp"
#include "support/brute_force.hpp"
#include "support/stats.hpp"

using namespace kbr;

namespace {

const KnowledgeBase& fixture() {
  static const KnowledgeBase kb = [] {
    SyntheticKbOptions o;
    o.trees = 2;
    o.counting_sets_per_predicate = 10;
    return make_synthetic_kb(o);
  }();
  return kb;
}

KnowledgeBase beatles_kb(bool with_carpenters) {
  std::vector<Triple> t = {
      {"the beatles", "has-4", "band member", true, {}},
      {"john lennon", "band member", "the beatles", true, {}},
      {"paul mccartney", "band member", "the beatles", true, {}},
      {"george harrison", "band member", "the beatles", true, {}},
      {"ringo starr", "band member", "the beatles", true, {}},
      {"mick jagger", "band member", "the rolling stones", true, {}},
  };
  if (with_carpenters) {
    t.push_back({"the carpenters", "has-2", "band member", true, {}});
    t.push_back({"karen carpenter", "band member", "the carpenters", true, {}});
    t.push_back({"richard carpenter", "band member", "the carpenters", true, {}});
    t.push_back({"amazon", "has-1", "CEO", true, {}});
    t.push_back({"jeff bezos", "CEO", "amazon", true, {}});
  }
  SurfaceForms surfaces;
  for (const auto& [id, s] : std::map<std::string, std::string>{
           {"the beatles", "The Beatles"}, {"mick jagger", "Mick Jagger"},
           {"john lennon", "John Lennon"}, {"the carpenters", "The Carpenters"}}) {
    surfaces.record(id, s);
  }
  return KnowledgeBase(PredicateRegistry::builtin(), std::move(t), std::move(surfaces));
}

std::string oracle(std::span<const Statement> statements, const Statement& h) {
  return testing::brute_force_verdict(statements, h, PredicateRegistry::builtin());
}

}  // namespace

TEST_CASE("Beatles set: K=4 with the k=K case naming a non-member") {
  auto kb = beatles_kb(false);
  CountingGenerator gen(kb);
  REQUIRE(gen.sets().size() == 1);
  CHECK(gen.sets()[0].K == 4);
  CountingOptions o;
  o.distractors = false;
  auto examples = gen.expand(gen.sets()[0], 0, 7, o);
  REQUIRE(examples.size() == 7);
  const Example& last = examples.back();
  CHECK(last.meta.k == 4);
  CHECK_FALSE(last.label);
  CHECK(last.hypothesis.text == "Mick Jagger is a member of The Beatles.");
  CHECK(last.withheld.empty());
  CHECK(oracle(last.context, last.hypothesis) == "false");
}

TEST_CASE("mismatched member count is skipped with a warning") {
  std::vector<Triple> t = {{"trio", "has-3", "band member", true, {}},
                           {"a", "band member", "trio", true, {}},
                           {"b", "band member", "trio", true, {}}};
  KnowledgeBase kb(PredicateRegistry::builtin(), t, {});
  std::vector<std::string> warnings;
  CHECK(build_counting_sets(kb, &warnings).empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("trio") != std::string::npos);
  CHECK(build_counting_sets(KnowledgeBase(PredicateRegistry::builtin())).empty());
}

TEST_CASE("expansion cardinality and label multiset for K = 1..5") {
  const auto& kb = fixture();
  CountingGenerator gen(kb);
  std::set<int> seen_k;
  std::size_t total = 0, full = 0, denominator = 0;
  for (std::size_t i = 0; i < gen.sets().size(); ++i) {
    const auto& set = gen.sets()[i];
    REQUIRE(set.members.size() == static_cast<std::size_t>(set.K));
    for (const auto& m : set.members) CHECK(m.predicate == set.member_predicate);
    seen_k.insert(set.K);
    auto examples = gen.expand(set, i, 3, {});
    CHECK(examples.size() == static_cast<std::size_t>(2 * set.K - 1));
    std::size_t positives = 0;
    for (const auto& e : examples) {
      positives += e.label ? 1 : 0;
      CHECK(e.meta.K == set.K);
      CHECK(e.has_tag(StatementTag::QuantityFact));
      if (e.meta.k == set.K) {
        ++full;
        CHECK_FALSE(e.label);
      }
    }
    CHECK(positives == static_cast<std::size_t>(set.K - 1));
    total += examples.size();
    denominator += static_cast<std::size_t>(2 * set.K - 1);
  }
  CHECK(seen_k == std::set<int>{1, 2, 3, 4, 5});
  CHECK(total == denominator);
  CHECK(full == gen.sets().size());
}

TEST_CASE("context alone decides only the k=K case") {
  const auto& kb = fixture();
  CountingGenerator gen(kb);
  for (bool distractors : {false, true}) {
    CountingOptions o;
    o.distractors = distractors;
    for (const auto& e : expand_all(gen, 5, o, Execution::Serial)) {
      const bool full = e.meta.k == e.meta.K;
      CHECK(oracle(e.context, e.hypothesis) == (full ? "false" : "unknown"));
      CHECK(oracle(e.all_statements(), e.hypothesis) == (e.label ? "true" : "false"));
      if (distractors) {
        std::size_t extra = 0;
        for (const auto& s : e.context) extra += is_distractor(s.tag) ? 1 : 0;
        CHECK(extra == 4);
        CHECK(e.meta.flag(flags::kWithDistractors));
      }
    }
  }
}

TEST_CASE("distractors follow the Carpenters / unrelated-relation pattern") {
  auto kb = beatles_kb(true);
  CountingGenerator gen(kb);
  const auto& beatles = gen.sets()[std::find_if(gen.sets().begin(), gen.sets().end(),
                                                [](const CountingSet& s) {
                                                  return s.entity == "the beatles";
                                                }) -
                                   gen.sets().begin()];
  auto examples = gen.expand(beatles, 0, 2, {});
  for (const auto& e : examples) {
    bool carpenters_quantity = false, carpenters_member = false;
    for (const auto& s : e.context) {
      if (s.tag == StatementTag::DistractorQuantityFact && s.fact().subject == "the carpenters") {
        carpenters_quantity = true;
      }
      if (s.tag == StatementTag::DistractorMemberFact && s.fact().object == "the carpenters") {
        carpenters_member = true;
      }
    }
    CHECK(carpenters_quantity);
    CHECK(carpenters_member);
  }
  // Only the Beatles share the predicate with the Carpenters' set in reverse.
  KnowledgeBase lonely = beatles_kb(false);
  CountingGenerator g2(lonely);
  CHECK_THROWS_WITH_AS(g2.expand(g2.sets()[0], 0, 2, {}),
                       doctest::Contains("no same-predicate distractor"), GenerationError);
}

TEST_CASE("dropping the quantity fact") {
  auto kb = beatles_kb(false);
  CountingGenerator gen(kb);
  CountingOptions o;
  o.distractors = false;
  auto examples = gen.expand(gen.sets()[0], 0, 7, o);
  const Example dropped = drop_quantity_fact(examples.back());
  CHECK_FALSE(dropped.has_tag(StatementTag::QuantityFact));
  CHECK(dropped.label == examples.back().label);
  CHECK(dropped.meta.flag(flags::kQuantityDropped));
  CHECK(oracle(dropped.context, dropped.hypothesis) == "unknown");
  CHECK_THROWS_AS(drop_quantity_fact(dropped), Error);
}

TEST_CASE("probability order selects the k context facts") {
  std::vector<Triple> t = {{"trio", "has-3", "band member", true, {}},
                           {"a", "band member", "trio", true, {}},
                           {"b", "band member", "trio", true, {}},
                           {"c", "band member", "trio", true, {}},
                           {"duo", "has-1", "band member", true, {}},
                           {"d", "band member", "duo", true, {}},
                           {"amazon", "has-1", "CEO", true, {}},
                           {"jeff bezos", "CEO", "amazon", true, {}}};
  KnowledgeBase kb(PredicateRegistry::builtin(), t, {});
  CountingGenerator gen(kb);
  REQUIRE(gen.sets()[2].entity == "trio");
  ProbabilityMap probs = {{"a|band member|trio", 0.9},
                          {"b|band member|trio", 0.2},
                          {"c|band member|trio", 0.6}};
  auto context_members = [](const Example& e) {
    std::set<std::string> out;
    for (const auto& s : e.context) {
      if (s.tag == StatementTag::MemberFact) out.insert(s.fact().subject);
    }
    return out;
  };
  auto asc = order_by_fact_probability(gen, gen.sets()[2], 0, probs, Ordering::Ascending, 1);
  auto desc = order_by_fact_probability(gen, gen.sets()[2], 0, probs, Ordering::Descending, 1);
  REQUIRE(asc.size() == 7);  // k=0 pair, k=1 pair, k=2 pair, k=3 single
  REQUIRE(desc.size() == 7);
  const Example& a2 = asc[4];
  CHECK(a2.meta.k == 2);
  CHECK(context_members(a2) == std::set<std::string>{"b", "c"});
  CHECK(context_members(desc[4]) == std::set<std::string>{"a", "c"});
  for (std::size_t i : {0, 1, 6}) {
    CHECK(asc[i].hypothesis.text == desc[i].hypothesis.text);
    CHECK(asc[i].label == desc[i].label);
    CHECK(to_json(asc[i])["context"] == to_json(desc[i])["context"]);
    CHECK(to_json(asc[i])["withheld"] == to_json(desc[i])["withheld"]);
  }
  probs.erase("c|band member|trio");
  CHECK_THROWS_WITH_AS(
      order_by_fact_probability(gen, gen.sets()[2], 0, probs, Ordering::Ascending, 1),
      doctest::Contains("c|band member|trio"), Error);
}

TEST_CASE("probability map file round trip and validation") {
  ProbabilityMap probs = {{"a|band member|trio", 0.25}, {"b|band member|trio", 1.0}};
  std::stringstream buf;
  write_probability_map(buf, probs);
  std::istringstream in(buf.str());
  CHECK(read_probability_map(in, "p.jsonl") == probs);
  std::istringstream bad("{\"fact\":\"a|band member|trio\",\"p_true\":1.5}\n");
  CHECK_THROWS_WITH_AS(read_probability_map(bad, "p.jsonl"), doctest::Contains("p.jsonl:1"),
                       LoadError);
}

TEST_CASE("counting dataset splits whole sets, deterministically") {
  const auto& kb = fixture();
  CountingDatasetOptions o;
  o.seed = 4;
  o.exec = Execution::Serial;
  Splits a = generate_counting_dataset(kb, o);
  o.exec = Execution::Parallel;
  Splits b = generate_counting_dataset(kb, o);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(to_json(a.train[i]) == to_json(b.train[i]));
  auto entities = [](const std::vector<Example>& part) {
    std::set<std::string> out;
    for (const auto& e : part) out.insert(e.meta.extra["entity"].get<std::string>());
    return out;
  };
  const auto train = entities(a.train);
  for (const auto& x : entities(a.test)) CHECK_FALSE(train.contains(x));
  CHECK_FALSE(a.test.empty());
  CHECK_FALSE(a.dev.empty());
}

TEST_CASE("statement count carries the same label signal with or without distractors") {
  const auto& kb = fixture();
  CountingGenerator gen(kb);
  auto auc_for = [&](bool distractors) {
    CountingOptions o;
    o.distractors = distractors;
    std::vector<double> scores;
    std::vector<bool> labels;
    for (const auto& e : expand_all(gen, 9, o, Execution::Serial)) {
      scores.push_back(static_cast<double>(e.context.size()));
      labels.push_back(e.label);
    }
    return testing::rank_auc(scores, labels);
  };
  const double with = auc_for(true);
  const double without = auc_for(false);
  // A constant shift in statement count leaves the ranking unchanged.
  CHECK(with == doctest::Approx(without).epsilon(1e-12));
  CHECK(with < 0.9);
}
