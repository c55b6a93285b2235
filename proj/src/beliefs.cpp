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

#include "kbr/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"
#include "kbr/random.hpp"
#include "kbr/reasoner.hpp"

namespace kbr {

void BeliefTable::set(const TripleKey& key, Belief belief) {
  if (!(belief.confidence >= 0.0 && belief.confidence <= 1.0)) {
    throw Error("confidence for " + canonical(key) + " outside [0,1]");
  }
  if (belief.confidence == 0.5) {
    throw Error("confidence 0.5 for " + canonical(key) + " decides nothing");
  }
  if ((belief.confidence < 0.5) != belief.wrong()) {
    throw Error("confidence for " + canonical(key) + " disagrees with the believed truth");
  }
  auto [it, inserted] = beliefs_.insert_or_assign(key, belief);
  if (inserted) by_subject_[key.subject].push_back(key);
}

const Belief* BeliefTable::find(const TripleKey& key) const {
  auto it = beliefs_.find(key);
  return it == beliefs_.end() ? nullptr : &it->second;
}

std::size_t BeliefTable::wrong_count() const {
  return static_cast<std::size_t>(std::count_if(
      beliefs_.begin(), beliefs_.end(), [](const auto& kv) { return kv.second.wrong(); }));
}

std::vector<TripleKey> BeliefTable::keys() const {
  std::vector<TripleKey> out;
  out.reserve(beliefs_.size());
  for (const auto& [key, _] : beliefs_) out.push_back(key);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<TripleKey, Belief>> BeliefTable::about(const std::string& subject) const {
  std::vector<std::pair<TripleKey, Belief>> out;
  auto it = by_subject_.find(subject);
  if (it == by_subject_.end()) return out;
  for (const auto& key : it->second) out.emplace_back(key, beliefs_.at(key));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

ProbabilityMap BeliefTable::probability_map() const {
  ProbabilityMap out;
  for (const auto& [key, belief] : beliefs_) out[canonical(key)] = belief.p_true();
  return out;
}

void BeliefTable::write(std::ostream& out) const {
  for (const auto& key : keys()) {
    const Belief& b = beliefs_.at(key);
    out << nlohmann::json{{"fact", canonical(key)},
                          {"truth", b.truth},
                          {"believed", b.believed},
                          {"confidence", b.confidence}}
               .dump()
        << '\n';
  }
}

BeliefTable BeliefTable::read(std::istream& in, std::string_view origin) {
  BeliefTable table;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Belief b;
      b.truth = j.at("truth").get<bool>();
      b.believed = j.at("believed").get<bool>();
      b.confidence = j.at("confidence").get<double>();
      table.set(parse_canonical(j.at("fact").get<std::string>()), b);
    } catch (const std::exception& e) {
      throw LoadError(std::string(origin) + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return table;
}

BeliefTable BeliefTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return read(in, path.string());
}

BeliefTable corrupt_beliefs(std::span<const Triple> facts, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error("corruption rate " + std::to_string(rate) + " outside [0,1]");
  }
  BeliefTable table;
  for (const Triple& t : facts) {
    const TripleKey key = t.key();
    if (table.contains(key)) continue;
    Rng rng = make_rng(seed, streams::kBeliefs, fnv1a(canonical(key)));
    const bool flip = bernoulli(rng, rate);
    const double u = uniform_unit(rng);
    table.set(key, {t.truth, flip ? !t.truth : t.truth, flip ? 0.5 * u : 1.0 - 0.5 * u});
  }
  return table;
}

BeliefTable corrupt_beliefs(const KnowledgeBase& kb, double rate, std::uint64_t seed,
                            std::span<const Example> examples) {
  std::vector<Triple> facts(kb.triples().begin(), kb.triples().end());
  for (const auto& e : examples) {
    for (const auto* part : {&e.context, &e.withheld}) {
      for (const auto& s : *part) {
        if (s.is_fact()) facts.push_back(s.fact());
      }
    }
  }
  return corrupt_beliefs(facts, rate, seed);
}

bool in_belief_scope(const Statement& s) {
  return s.is_fact() && (is_hypernym_tag(s.tag) || s.tag == StatementTag::MemberFact ||
                         s.tag == StatementTag::QuantityFact);
}

std::vector<Statement> believer_premises(const BeliefTable& beliefs, const Example& example) {
  std::vector<Statement> statements;
  std::unordered_set<TripleKey> stated;
  for (const auto& s : example.context) {
    if (s.is_raw()) continue;
    if (s.is_fact()) stated.insert(s.fact().key());
    statements.push_back(s);
  }
  for (const auto& s : example.withheld) {
    if (!in_belief_scope(s)) continue;
    const TripleKey key = s.fact().key();
    const Belief* b = beliefs.find(key);
    if (b == nullptr || !stated.insert(key).second) continue;
    Statement believed = s;
    std::get<Triple>(believed.content).truth = b->believed;
    statements.push_back(std::move(believed));
  }
  return statements;
}

double score_premises(std::span<const Statement> premises, const Triple& hypothesis,
                      const PredicateRegistry& registry) {
  try {
    switch (entail(premises, hypothesis, registry).value) {
      case Truth::True:
        return 1.0;
      case Truth::False:
        return 0.0;
      case Truth::Unknown:
        return 0.5;
    }
  } catch (const ContradictionError&) {
    // Conflicting beliefs: no systematic answer.
  }
  return 0.5;
}

double believer_predict(const BeliefTable& beliefs, const Example& example,
                        const PredicateRegistry& registry) {
  if (!example.hypothesis.is_fact()) return 0.5;
  return score_premises(believer_premises(beliefs, example), example.hypothesis.fact(), registry);
}

}  // namespace kbr
