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

#include "kbr/eval.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kbr/error.hpp"
#include "kbr/random.hpp"

namespace kbr {

namespace {

using PredictionIndex = std::unordered_map<std::string_view, const Prediction*>;

std::string id_list(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) out += " (+" + std::to_string(ids.size() - shown) + " more)";
  return out;
}

// Lookup for every example of `dataset`; throws naming the missing ids.
PredictionIndex index_predictions(std::span<const Example> dataset,
                                  std::span<const Prediction> predictions) {
  PredictionIndex index;
  for (const auto& p : predictions) index.emplace(p.id, &p);
  std::vector<std::string> missing;
  for (const auto& e : dataset) {
    if (!index.contains(e.id)) missing.push_back(e.id);
  }
  if (!missing.empty()) throw Error("no prediction for ids " + id_list(missing));
  return index;
}

}  // namespace

void Accuracy::add(const Prediction& p) {
  ++count;
  correct += p.correct();
  ties += p.tie();
}

double Accuracy::value() const {
  return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
}

SetupResult score_examples(std::span<const Example> examples, ModelClient& client,
                           std::string_view stage, int retries) {
  if (examples.empty()) throw Error("cannot score an empty dataset");
  std::vector<PredictRequest> requests;
  requests.reserve(examples.size());
  for (const auto& e : examples) requests.push_back(make_request(e));
  client.prepare(stage, examples);
  const auto responses = batch_predict(client, requests, retries);

  SetupResult result;
  result.name = std::string(stage);
  result.predictions.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    result.predictions.push_back({examples[i].id, examples[i].label, responses[i].p_true});
  }
  // Deterministic fold: aggregate over id order.
  std::sort(result.predictions.begin(), result.predictions.end(),
            [](const Prediction& a, const Prediction& b) { return a.id < b.id; });
  for (const auto& p : result.predictions) result.accuracy.add(p);
  return result;
}

SetupResult run_setup(std::span<const Example> dataset, Setup setup, ModelClient& client,
                      const Verbalizer& verbalizer, const RunOptions& options) {
  if (dataset.empty()) throw Error("setup " + std::string(to_string(setup)) + ": empty dataset");
  const auto view = apply_view(setup, dataset, verbalizer, options.seed, options.exec);
  return score_examples(view, client, to_string(setup), options.retries);
}

// ---------------------------------------------------------------- probing

namespace {

std::vector<PredictRequest> probe_requests(const Example& e, const Verbalizer& verbalizer,
                                           ProbeMode mode, std::vector<Statement>& facts) {
  std::vector<PredictRequest> out;
  for (const auto& s : e.withheld) {
    if (!s.is_fact()) continue;
    PredictRequest r;
    r.id = e.id + "#probe-" + std::to_string(facts.size());
    r.hypothesis = verbalizer.affirmative_text(s.fact());
    if (mode == ProbeMode::InContext) {
      for (const auto& c : e.context) r.context.push_back(c.text);
    }
    facts.push_back(s);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<Assessment> probe_beliefs(const Example& example, ModelClient& client,
                                      const Verbalizer& verbalizer, ProbeMode mode,
                                      int retries) {
  std::vector<Statement> facts;
  const auto requests = probe_requests(example, verbalizer, mode, facts);
  if (requests.empty()) return {};
  client.prepare("probe", {});
  const auto responses = batch_predict(client, requests, retries);
  std::vector<Assessment> out;
  for (std::size_t i = 0; i < facts.size(); ++i) out.push_back({facts[i], responses[i].p_true});
  return out;
}

AssessmentMap probe_dataset(std::span<const Example> examples, ModelClient& client,
                            const Verbalizer& verbalizer, ProbeMode mode, int retries) {
  AssessmentMap out;
  std::vector<PredictRequest> requests;
  std::vector<std::pair<std::string, Statement>> owners;
  for (const auto& e : examples) {
    std::vector<Statement> facts;
    auto reqs = probe_requests(e, verbalizer, mode, facts);
    out[e.id];
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      requests.push_back(std::move(reqs[i]));
      owners.emplace_back(e.id, std::move(facts[i]));
    }
  }
  if (requests.empty()) return out;
  client.prepare("probe", {});
  const auto responses = batch_predict(client, requests, retries);
  for (std::size_t i = 0; i < owners.size(); ++i) {
    out[owners[i].first].push_back({std::move(owners[i].second), responses[i].p_true});
  }
  return out;
}

std::string_view to_string(BeliefCategory c) {
  switch (c) {
    case BeliefCategory::AllCorrect:
      return "all-correct";
    case BeliefCategory::SomeIncorrect:
      return "some-incorrect";
    case BeliefCategory::AllIncorrect:
      return "all-incorrect";
  }
  return "?";
}

BeliefCategory categorize(std::span<const Assessment> assessments) {
  const auto wrong = static_cast<std::size_t>(std::count_if(
      assessments.begin(), assessments.end(), [](const Assessment& a) { return !a.correct(); }));
  if (wrong == 0) return BeliefCategory::AllCorrect;
  return wrong == assessments.size() ? BeliefCategory::AllIncorrect
                                     : BeliefCategory::SomeIncorrect;
}

std::size_t CategoryTable::total() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.count;
  return n;
}

CategoryTable categorize_by_beliefs(std::span<const Example> dataset,
                                    const AssessmentMap& assessments,
                                    std::span<const Prediction> predictions) {
  std::vector<std::string> uncovered;
  for (const auto& e : dataset) {
    if (!assessments.contains(e.id)) uncovered.push_back(e.id);
  }
  if (!uncovered.empty()) throw Error("no belief assessments for ids " + id_list(uncovered));
  const auto index = index_predictions(dataset, predictions);
  CategoryTable table;
  for (const auto& e : dataset) {
    const auto bucket = categorize(assessments.at(e.id));
    table.buckets[static_cast<std::size_t>(bucket)].add(*index.at(e.id));
  }
  return table;
}

// ------------------------------------------------------------ intervention

Example intervene(const Example& example, std::span<const Statement> wrong) {
  Example out = example;
  std::unordered_set<TripleKey> stated;
  for (const auto& s : out.context) {
    if (s.is_fact()) stated.insert(s.fact().key());
  }
  for (const auto& w : wrong) {
    if (!w.is_fact()) throw Error("example " + example.id + ": only facts can be corrected");
    const TripleKey key = w.fact().key();
    auto it = std::find_if(example.withheld.begin(), example.withheld.end(),
                           [&](const Statement& s) { return s.is_fact() && s.fact().key() == key; });
    if (it == example.withheld.end()) {
      throw Error("example " + example.id + ": '" + w.text + "' is not withheld");
    }
    if (stated.insert(key).second) out.context.push_back(*it);
  }
  Rng rng = make_rng(example.meta.seed, streams::kIntervention, fnv1a(example.id));
  shuffle(out.context, rng);
  out.meta.flags[flags::kIntervened] = true;
  return out;
}

double InterventionReport::fraction_beliefs_corrected() const {
  return beliefs_probed == 0
             ? 0.0
             : static_cast<double>(beliefs_corrected) / static_cast<double>(beliefs_probed);
}

double InterventionReport::fraction_examples_corrected() const {
  return examples == 0 ? 0.0
                       : static_cast<double>(examples_corrected) / static_cast<double>(examples);
}

InterventionReport run_intervention(std::span<const Example> dataset,
                                    const AssessmentMap& assessments,
                                    std::span<const Prediction> before, ModelClient& client,
                                    int retries) {
  const auto index = index_predictions(dataset, before);
  InterventionReport report;
  report.examples = dataset.size();
  std::vector<Example> corrected;
  corrected.reserve(dataset.size());
  for (const auto& e : dataset) {
    report.before.add(*index.at(e.id));
    auto it = assessments.find(e.id);
    if (it == assessments.end()) throw Error("no belief assessments for id " + e.id);
    std::vector<Statement> wrong;
    for (const auto& a : it->second) {
      if (!a.correct()) wrong.push_back(a.fact);
    }
    report.beliefs_probed += it->second.size();
    report.beliefs_corrected += wrong.size();
    report.examples_corrected += !wrong.empty();
    corrected.push_back(intervene(e, wrong));
  }
  report.after = score_examples(corrected, client, "intervention", retries).accuracy;
  return report;
}

// ---------------------------------------------------------------- analyses

std::vector<CurvePoint> counting_curve(std::span<const Example> dataset,
                                       std::span<const Prediction> predictions) {
  const auto index = index_predictions(dataset, predictions);
  std::map<std::pair<std::string, double>, CurvePoint> groups;
  for (const auto& e : dataset) {
    if (!e.meta.c || e.meta.ordering.empty()) {
      throw Error("example " + e.id + " lacks c/ordering meta for the counting curve");
    }
    CurvePoint& p = groups[{e.meta.ordering, *e.meta.c}];
    p.c = *e.meta.c;
    p.ordering = e.meta.ordering;
    p.accuracy.add(*index.at(e.id));
    (e.label ? p.positives : p.negatives) += 1;
  }
  std::vector<CurvePoint> out;
  for (auto& [_, p] : groups) out.push_back(std::move(p));
  return out;
}

std::vector<BreakdownRow> counting_subsets(std::span<const Example> dataset,
                                           std::span<const Prediction> predictions) {
  const auto index = index_predictions(dataset, predictions);
  std::array<BreakdownRow, 3> rows{{{"0", {}}, {"1..K-1", {}}, {"K", {}}}};
  for (const auto& e : dataset) {
    if (!e.meta.k || !e.meta.K) throw Error("example " + e.id + " lacks k/K meta");
    const std::size_t slot = *e.meta.k == 0 ? 0 : *e.meta.k < *e.meta.K ? 1 : 2;
    rows[slot].accuracy.add(*index.at(e.id));
  }
  std::vector<BreakdownRow> out;
  for (auto& r : rows) {
    if (r.accuracy.count > 0) out.push_back(std::move(r));
  }
  return out;
}

std::vector<BreakdownRow> skill_breakdown(std::span<const Example> dataset,
                                          std::span<const Prediction> predictions) {
  const auto index = index_predictions(dataset, predictions);
  std::map<std::string, Accuracy> single;
  static const std::array<std::pair<std::string_view, std::string_view>, 3> kPairs = {{
      {"hypernyms", "counting"},
      {"hypernyms", "sizes"},
      {"hypernyms", "age/year"},
  }};
  std::array<Accuracy, 3> pairs;
  for (const auto& e : dataset) {
    const Prediction& p = *index.at(e.id);
    const std::set<std::string> tags(e.meta.skills.begin(), e.meta.skills.end());
    for (const auto& t : tags) single[t].add(p);
    for (std::size_t i = 0; i < kPairs.size(); ++i) {
      if (tags.contains(std::string(kPairs[i].first)) &&
          tags.contains(std::string(kPairs[i].second))) {
        pairs[i].add(p);
      }
    }
  }
  std::vector<BreakdownRow> out;
  for (const auto& [tag, acc] : single) out.push_back({tag, acc});
  for (std::size_t i = 0; i < kPairs.size(); ++i) {
    if (pairs[i].count > 0) {
      out.push_back({std::string(kPairs[i].first) + "+" + std::string(kPairs[i].second),
                     pairs[i]});
    }
  }
  return out;
}

TemplateBreakdown template_breakdown(std::span<const Example> dataset,
                                     std::span<const Prediction> predictions) {
  const auto index = index_predictions(dataset, predictions);
  std::map<std::string, Accuracy> per;
  TemplateBreakdown out;
  for (const auto& e : dataset) {
    auto it = e.meta.extra.find("template");
    const std::string name = it != e.meta.extra.end() && it->is_string()
                                 ? it->get<std::string>()
                                 : std::string("(none)");
    per[name].add(*index.at(e.id));
    out.micro.add(*index.at(e.id));
  }
  double sum = 0;
  for (const auto& [name, acc] : per) {
    out.templates.push_back({name, acc});
    sum += acc.value();
  }
  out.macro = per.empty() ? 0.0 : sum / static_cast<double>(per.size());
  return out;
}

}  // namespace kbr
