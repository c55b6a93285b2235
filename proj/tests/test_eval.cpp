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

#include <algorithm>
#include <set>
#include <sstream>

#include "kbr/clients.hpp"
#include "kbr/counting.hpp"
#include "kbr/error.hpp"
#include "kbr/eval.hpp"
#include "kbr/multiskill.hpp"
#include "kbr/report.hpp"
#include "kbr/synthetic.hpp"
#include "kbr/taxonomy.hpp"
#include "support/brute_force.hpp"

using namespace kbr;
using kbr::testing::brute_force_verdict;

namespace {

const std::filesystem::path kData = KBR_DATA_DIR;

const KnowledgeBase& fixture() {
  static const KnowledgeBase kb = [] {
    SyntheticKbOptions o;
    o.trees = 40;
    o.counting_sets_per_predicate = 4;
    return make_synthetic_kb(o);
  }();
  return kb;
}

const std::vector<Example>& taxonomy() {
  static const std::vector<Example> d = [] {
    TaxonomyGenerator gen(fixture());
    return apply_ablation_policy(gen.generate_pairs(80, 21, Execution::Serial), {}, 21);
  }();
  return d;
}

BelieverClient believer(double rate, std::span<const Example> examples) {
  return BelieverClient(corrupt_beliefs(fixture(), rate, 5, examples), fixture().verbalizer(),
                        "believer", Execution::Serial);
}

std::multiset<std::string> all_texts(const Example& e) {
  std::multiset<std::string> out;
  for (const auto& s : e.context) out.insert(s.text);
  for (const auto& s : e.withheld) out.insert(s.text);
  return out;
}

// What a reader with these beliefs should answer, worked out with the
// brute-force oracle on the context plus believed withheld facts.
double expected_believer_answer(const BeliefTable& beliefs, const Example& e) {
  std::vector<Statement> premises = e.context;
  for (const auto& w : e.withheld) {
    if (!w.is_fact()) continue;
    const bool scoped = w.tag == StatementTag::RelevantHypernym ||
                        w.tag == StatementTag::DistractorHypernym ||
                        w.tag == StatementTag::MemberFact || w.tag == StatementTag::QuantityFact;
    if (!scoped) continue;
    const Belief* b = beliefs.find(w.fact().key());
    REQUIRE(b != nullptr);
    Triple t = w.fact();
    t.truth = b->believed;
    premises.push_back(Statement{"", StatementTag::Plain, t});
  }
  const auto v = brute_force_verdict(premises, e.hypothesis, fixture().registry());
  return v == "true" ? 1.0 : v == "false" ? 0.0 : 0.5;
}

std::vector<Prediction> all_correct(std::span<const Example> examples) {
  std::vector<Prediction> out;
  for (const auto& e : examples) out.push_back({e.id, e.label, e.label ? 0.9 : 0.1});
  return out;
}

}  // namespace

TEST_CASE("setup names round-trip; unknown names list the choices") {
  for (Setup s : all_setups()) CHECK(setup_from_string(to_string(s)) == s);
  CHECK(all_setups().size() == 8);
  CHECK(to_string(Setup::Implicit) == "IMPLICIT");
  try {
    setup_from_string("implicit");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("IMPLICIT") != std::string::npos);
  }
}

TEST_CASE("views keep ids, labels and the statement multiset") {
  const auto& v = fixture().verbalizer();
  for (Setup s : {Setup::NoContext, Setup::RelevantRemoved, Setup::Explicit, Setup::Implicit}) {
    const auto view = apply_view(s, taxonomy(), v, 3, Execution::Serial);
    const auto parallel = apply_view(s, taxonomy(), v, 3, Execution::Parallel);
    REQUIRE(view.size() == taxonomy().size());
    for (std::size_t i = 0; i < view.size(); ++i) {
      const Example& a = taxonomy()[i];
      const Example& b = view[i];
      CHECK(b.id == a.id);
      CHECK(b.label == a.label);
      CHECK(b.hypothesis.text == a.hypothesis.text);
      CHECK(all_texts(b) == all_texts(a));
      CHECK(to_json(b) == to_json(parallel[i]));
      CHECK(b.meta.extra.at("view") == std::string(to_string(s)));
      switch (s) {
        case Setup::NoContext:
          CHECK(b.context.empty());
          break;
        case Setup::Explicit:
          CHECK(b.withheld.empty());
          break;
        case Setup::Implicit:
          for (const auto& c : b.context) {
            CHECK(c.tag != StatementTag::RelevantHypernym);
            CHECK(c.tag != StatementTag::DistractorHypernym);
          }
          break;
        case Setup::RelevantRemoved:
          for (const auto& c : b.context) {
            CHECK(c.tag != StatementTag::RelevantHypernym);
            CHECK(c.tag != StatementTag::RelevantProperty);
          }
          break;
        default:
          break;
      }
    }
  }
}

TEST_CASE("a perfect believer solves implicit and explicit, never the bare hypothesis") {
  const auto& v = fixture().verbalizer();
  auto client = believer(0.0, taxonomy());
  for (Setup s : {Setup::Implicit, Setup::Explicit}) {
    const auto r = run_setup(taxonomy(), s, client, v);
    CHECK(r.name == to_string(s));
    CHECK(r.accuracy.count == taxonomy().size());
    CHECK(r.accuracy.value() == 1.0);
  }
  // Properties are never believed, so nothing is derivable: every answer ties.
  const auto none = run_setup(taxonomy(), Setup::NoContext, client, v);
  CHECK(none.accuracy.ties == taxonomy().size());
  CHECK(none.accuracy.value() == 0.0);
}

TEST_CASE("corrupted believer matches the brute-force expectation example by example") {
  const auto& v = fixture().verbalizer();
  auto client = believer(0.2, taxonomy());
  const auto view = apply_view(Setup::Implicit, taxonomy(), v, 1, Execution::Serial);
  const auto r = score_examples(view, client, "IMPLICIT");
  std::map<std::string, double> got;
  for (const auto& p : r.predictions) got[p.id] = p.p_true;
  for (const auto& e : view) CHECK(got.at(e.id) == expected_believer_answer(client.beliefs(), e));
  CHECK(r.accuracy.value() > 0.0);
  CHECK(r.accuracy.value() < 1.0);

  // Explicit context overrides any belief.
  CHECK(run_setup(taxonomy(), Setup::Explicit, client, v).accuracy.value() == 1.0);
}

TEST_CASE("probes report exactly the corrupted beliefs") {
  const auto& v = fixture().verbalizer();
  auto client = believer(0.3, taxonomy());
  const auto view = apply_view(Setup::Implicit, taxonomy(), v, 1, Execution::Serial);
  const auto probes = probe_dataset(view, client, v);
  CHECK(probes.size() == view.size());
  std::size_t probed = 0;
  std::size_t wrong = 0;
  for (const auto& e : view) {
    const auto& list = probes.at(e.id);
    CHECK(list.size() == e.withheld.size());
    for (const auto& a : list) {
      const Belief* b = client.beliefs().find(a.fact.fact().key());
      REQUIRE(b != nullptr);
      CHECK(a.p_true == b->p_true());
      CHECK(a.correct() == !b->wrong());
      ++probed;
      wrong += !a.correct();
    }
  }
  CHECK(probed > 0);
  CHECK(wrong > 0);
  CHECK(wrong < probed);

  // In-context probing sees the same beliefs here: the context never states them.
  const auto in_context = probe_dataset(view, client, v, ProbeMode::InContext);
  for (const auto& [id, list] : probes) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(in_context.at(id)[i].correct() == list[i].correct());
    }
  }
  CHECK(probe_beliefs(view.front(), client, v).size() == view.front().withheld.size());
}

TEST_CASE("belief categories") {
  const Statement yes{"", StatementTag::Plain, Triple{"a", "IsA", "b", true, {}}};
  const Statement no{"", StatementTag::Plain, Triple{"a", "IsA", "c", false, {}}};
  const std::vector<Assessment> right{{yes, 0.9}, {no, 0.2}};
  const std::vector<Assessment> mixed{{yes, 0.9}, {no, 0.7}};
  const std::vector<Assessment> wrong{{yes, 0.1}, {no, 0.7}};
  CHECK(categorize(right) == BeliefCategory::AllCorrect);
  CHECK(categorize(mixed) == BeliefCategory::SomeIncorrect);
  CHECK(categorize(wrong) == BeliefCategory::AllIncorrect);
  CHECK(categorize({}) == BeliefCategory::AllCorrect);
  CHECK(to_string(BeliefCategory::SomeIncorrect) == "some-incorrect");

  const auto& v = fixture().verbalizer();
  auto client = believer(0.3, taxonomy());
  const auto view = apply_view(Setup::Implicit, taxonomy(), v, 1, Execution::Serial);
  const auto r = score_examples(view, client, "IMPLICIT");
  const auto probes = probe_dataset(view, client, v);
  const auto table = categorize_by_beliefs(view, probes, r.predictions);
  CHECK(table.total() == view.size());
  REQUIRE(table[BeliefCategory::AllCorrect].count > 0);
  CHECK(table[BeliefCategory::AllCorrect].value() == 1.0);
  // Both hypernyms wrong swaps relevant and distractor: systematically wrong.
  REQUIRE(table[BeliefCategory::AllIncorrect].count > 0);
  CHECK(table[BeliefCategory::AllIncorrect].value() == 0.0);

  AssessmentMap partial = probes;
  partial.erase(view[3].id);
  try {
    categorize_by_beliefs(view, partial, r.predictions);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(view[3].id) != std::string::npos);
  }
}

TEST_CASE("intervention restores every corrected example") {
  const auto& v = fixture().verbalizer();
  auto client = believer(0.3, taxonomy());
  const auto view = apply_view(Setup::Implicit, taxonomy(), v, 1, Execution::Serial);
  const auto before = score_examples(view, client, "IMPLICIT");
  const auto probes = probe_dataset(view, client, v);
  const auto report = run_intervention(view, probes, before.predictions, client);

  std::size_t probed = 0, wrong = 0, touched = 0;
  for (const auto& [id, list] : probes) {
    probed += list.size();
    const auto n = std::count_if(list.begin(), list.end(),
                                 [](const Assessment& a) { return !a.correct(); });
    wrong += static_cast<std::size_t>(n);
    touched += n > 0;
  }
  CHECK(report.beliefs_probed == probed);
  CHECK(report.beliefs_corrected == wrong);
  CHECK(report.examples_corrected == touched);
  CHECK(report.examples == view.size());
  CHECK(report.fraction_beliefs_corrected() == doctest::Approx(double(wrong) / double(probed)));
  CHECK(report.before.correct == before.accuracy.correct);
  CHECK(report.after.value() == 1.0);
  CHECK(report.after.value() > report.before.value());
}

TEST_CASE("intervene inserts withheld facts once and rejects others") {
  const auto& v = fixture().verbalizer();
  const auto view = apply_view(Setup::Implicit, taxonomy(), v, 1, Execution::Serial);
  const Example& e = view.front();
  REQUIRE_FALSE(e.withheld.empty());
  const std::vector<Statement> twice{e.withheld[0], e.withheld[0]};
  const Example fixed = intervene(e, twice);
  CHECK(fixed.context.size() == e.context.size() + 1);
  CHECK(fixed.meta.flag(flags::kIntervened));
  CHECK(to_json(intervene(e, twice)) == to_json(fixed));
  const std::vector<Statement> stranger{e.context.front()};
  CHECK_THROWS_AS(intervene(e, stranger), Error);
}

TEST_CASE("counting curve and subsets") {
  CountingGenerator gen(fixture());
  CountingOptions o;
  o.include_k0 = true;
  const auto dataset = expand_all(gen, 9, o, Execution::Serial);
  REQUIRE_FALSE(dataset.empty());
  auto client = make_oracle_client(fixture(), dataset, Execution::Serial);
  const auto r = run_setup(dataset, Setup::CountingFull, client, fixture().verbalizer());

  const auto curve = counting_curve(dataset, r.predictions);
  std::map<double, std::pair<std::size_t, std::size_t>> expected;  // c -> (pos, neg)
  for (const auto& e : dataset) {
    auto& [pos, neg] = expected[static_cast<double>(*e.meta.k) / *e.meta.K];
    (e.label ? pos : neg) += 1;
  }
  REQUIRE(curve.size() == expected.size());
  for (const auto& p : curve) {
    CHECK(p.ordering == "random");
    CHECK(p.positives == expected.at(p.c).first);
    CHECK(p.negatives == expected.at(p.c).second);
    CHECK(p.accuracy.count == p.positives + p.negatives);
  }
  REQUIRE(curve.back().c == 1.0);
  CHECK(curve.back().accuracy.value() == 1.0);

  const auto subsets = counting_subsets(dataset, r.predictions);
  REQUIRE(subsets.size() == 3);
  CHECK(subsets[0].group == "0");
  CHECK(subsets[2].group == "K");
  CHECK(subsets[2].accuracy.value() == 1.0);
  std::size_t total = 0;
  for (const auto& s : subsets) total += s.accuracy.count;
  CHECK(total == dataset.size());

  auto stripped = dataset;
  stripped[2].meta.c.reset();
  CHECK_THROWS_AS(counting_curve(stripped, r.predictions), Error);
  stripped[2].meta.K.reset();
  CHECK_THROWS_AS(counting_subsets(stripped, r.predictions), Error);
}

TEST_CASE("skill breakdown") {
  const Verbalizer v(PredicateRegistry::builtin());
  const auto manual = load_manual_multiskill(kData / "multiskill_manual.jsonl", v);
  const std::vector<Example> ten(manual.begin(), manual.begin() + 10);
  auto preds = all_correct(ten);
  preds[0].p_true = 1.0 - preds[0].p_true;
  preds[1].p_true = 0.5;

  // Expected counts straight from the records.
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_tag;  // tag -> (count, correct)
  for (std::size_t i = 0; i < ten.size(); ++i) {
    for (const auto& t : ten[i].meta.skills) {
      by_tag[t].first += 1;
      by_tag[t].second += i >= 2;
    }
  }
  const auto rows = skill_breakdown(ten, preds);
  for (const auto& row : rows) {
    if (row.group.find('+') != std::string::npos) continue;
    CHECK(row.accuracy.count == by_tag.at(row.group).first);
    CHECK(row.accuracy.correct == by_tag.at(row.group).second);
  }
  std::size_t single_rows = 0;
  for (const auto& row : rows) single_rows += row.group.find('+') == std::string::npos;
  CHECK(single_rows == by_tag.size());

  const Example& first = ten[0];
  const auto one = skill_breakdown(std::span(&first, 1), std::span(&preds[0], 1));
  CHECK(one.size() >= first.meta.skills.size());

  // Templates whose labels follow from the context alone are solved by an oracle.
  const KnowledgeBase empty(PredicateRegistry::builtin(), {}, {});
  std::vector<Example> solvable;
  for (const auto& t : load_skill_templates(kData / "skill_templates.jsonl")) {
    if (t.name == "inherited-properties" || t.name == "band-members") {
      auto ex = expand_template(t, v);
      solvable.insert(solvable.end(), ex.begin(), ex.end());
    }
  }
  auto oracle = make_oracle_client(empty, {}, Execution::Serial);
  const auto r = score_examples(solvable, oracle, "multiskill");
  for (const auto& row : skill_breakdown(solvable, r.predictions)) {
    CHECK_MESSAGE(row.accuracy.value() == 1.0, row.group);
  }
  const auto tb = template_breakdown(solvable, r.predictions);
  CHECK(tb.templates.size() == 2);
  CHECK(tb.macro == 1.0);
}

TEST_CASE("template macro and micro averages differ when sizes differ") {
  const Verbalizer v(PredicateRegistry::builtin());
  std::vector<Example> all;
  for (const auto& t : load_skill_templates(kData / "skill_templates.jsonl")) {
    if (t.name == "lifespan" || t.name == "particles") {
      auto ex = expand_template(t, v);
      all.insert(all.end(), ex.begin(), ex.end());
    }
  }
  auto preds = all_correct(all);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].meta.extra.at("template") == "particles") preds[i].p_true = 1.0 - preds[i].p_true;
  }
  const auto tb = template_breakdown(all, preds);
  CHECK(tb.macro == 0.5);
  CHECK(tb.micro.value() == doctest::Approx(120.0 / 160.0));
  const auto table = template_table(tb);
  CHECK(table[table.size() - 2][0] == "macro");
  CHECK(table.back()[0] == "micro");
  CHECK(table.back()[4] == "0.750000");
}

TEST_CASE("scores do not depend on dataset order") {
  const auto& v = fixture().verbalizer();
  auto client = believer(0.2, taxonomy());
  const auto a = run_setup(taxonomy(), Setup::Implicit, client, v);
  auto shuffled = taxonomy();
  Rng rng(77);
  shuffle(shuffled, rng);
  const auto b = run_setup(shuffled, Setup::Implicit, client, v);
  CHECK(a.accuracy.correct == b.accuracy.correct);
  REQUIRE(a.predictions.size() == b.predictions.size());
  for (std::size_t i = 0; i < a.predictions.size(); ++i) {
    CHECK(a.predictions[i].id == b.predictions[i].id);
    CHECK(a.predictions[i].p_true == b.predictions[i].p_true);
  }
  CHECK_THROWS_AS(run_setup({}, Setup::Implicit, client, v), Error);
}

TEST_CASE("reports: csv quoting, tables and hashes") {
  std::ostringstream out;
  write_csv(out, Table{{"a", "b,c"}, {"say \"hi\"", "line\nbreak"}});
  CHECK(out.str() == "a,\"b,c\"\n\"say \"\"hi\"\"\",\"line\nbreak\"\n");

  SetupResult r;
  r.name = "IMPLICIT";
  for (double p : {0.9, 0.1, 0.5, 0.7}) r.accuracy.add({"x", true, p});
  const auto t = table2(std::span(&r, 1));
  CHECK(t[1] == std::vector<std::string>{"IMPLICIT", "4", "2", "1", "0.500000"});

  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
