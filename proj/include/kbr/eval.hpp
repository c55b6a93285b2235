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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kbr/example.hpp"
#include "kbr/protocol.hpp"
#include "kbr/views.hpp"

namespace kbr {

/// A prediction is p_true >= 0.5 against the label; p_true == 0.5 is a tie
/// and always counts as wrong.
struct Prediction {
  std::string id;
  bool label = false;
  double p_true = 0.5;

  bool tie() const { return p_true == 0.5; }
  bool correct() const { return !tie() && (p_true >= 0.5) == label; }
};

struct Accuracy {
  std::size_t count = 0;
  std::size_t correct = 0;
  std::size_t ties = 0;

  void add(const Prediction& p);
  /// 0 for an empty group.
  double value() const;
};

struct SetupResult {
  std::string name;  // setup name, or the stage for unviewed scoring
  Accuracy accuracy;
  std::vector<Prediction> predictions;  // sorted by id
};

struct RunOptions {
  std::uint64_t seed = 1;
  int retries = 3;
  Execution exec = Execution::Parallel;
};

/// Scores `examples` as they are, under stage name `stage`.
SetupResult score_examples(std::span<const Example> examples, ModelClient& client,
                           std::string_view stage, int retries = 3);

/// Applies the setup's view and scores it. Throws Error on an empty dataset.
SetupResult run_setup(std::span<const Example> dataset, Setup setup, ModelClient& client,
                      const Verbalizer& verbalizer, const RunOptions& options = {});

// ---------------------------------------------------------------- probing

enum class ProbeMode { Bare, InContext };

/// One withheld fact asked as a hypothesis in its affirmative form.
struct Assessment {
  Statement fact;
  double p_true = 0.5;
  /// A 0.5 answer holds no belief either way and counts as incorrect.
  bool correct() const { return p_true != 0.5 && (p_true > 0.5) == fact.fact().truth; }
};

using AssessmentMap = std::map<std::string, std::vector<Assessment>>;

/// Bare mode asks each withheld fact with an empty context; InContext mode
/// sends the example's context along. Request ids are "<id>#probe-<n>".
std::vector<Assessment> probe_beliefs(const Example& example, ModelClient& client,
                                      const Verbalizer& verbalizer,
                                      ProbeMode mode = ProbeMode::Bare, int retries = 3);
/// All probes of the dataset in one batch. Every example gets an entry, empty
/// when nothing is withheld.
AssessmentMap probe_dataset(std::span<const Example> examples, ModelClient& client,
                            const Verbalizer& verbalizer, ProbeMode mode = ProbeMode::Bare,
                            int retries = 3);

enum class BeliefCategory { AllCorrect, SomeIncorrect, AllIncorrect };
std::string_view to_string(BeliefCategory c);

/// No assessments counts as all-correct.
BeliefCategory categorize(std::span<const Assessment> assessments);

struct CategoryTable {
  std::array<Accuracy, 3> buckets;  // indexed by BeliefCategory
  const Accuracy& operator[](BeliefCategory c) const {
    return buckets[static_cast<std::size_t>(c)];
  }
  std::size_t total() const;
};

/// Throws Error naming ids missing from `assessments` or `predictions`.
CategoryTable categorize_by_beliefs(std::span<const Example> dataset,
                                    const AssessmentMap& assessments,
                                    std::span<const Prediction> predictions);

// ------------------------------------------------------------ intervention

/// Appends the withheld statements matching `wrong` (by triple key) to the
/// context and reshuffles it with the example seed. Statements already in the
/// context are not repeated. Throws Error when a fact is not withheld.
Example intervene(const Example& example, std::span<const Statement> wrong);

struct InterventionReport {
  Accuracy before;
  Accuracy after;
  std::size_t beliefs_probed = 0;
  std::size_t beliefs_corrected = 0;
  std::size_t examples_corrected = 0;
  std::size_t examples = 0;

  double fraction_beliefs_corrected() const;
  double fraction_examples_corrected() const;
};

/// Corrects every wrong probed belief in its example and rescores.
InterventionReport run_intervention(std::span<const Example> dataset,
                                    const AssessmentMap& assessments,
                                    std::span<const Prediction> before, ModelClient& client,
                                    int retries = 3);

// ---------------------------------------------------------------- analyses

struct CurvePoint {
  double c = 0;
  std::string ordering;
  Accuracy accuracy;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Groups by (ordering, c), sorted. Throws Error for examples without c or
/// ordering meta.
std::vector<CurvePoint> counting_curve(std::span<const Example> dataset,
                                       std::span<const Prediction> predictions);

struct BreakdownRow {
  std::string group;
  Accuracy accuracy;
};

/// Counting subsets by k: "0", "1..K-1" and "K"; only non-empty ones.
std::vector<BreakdownRow> counting_subsets(std::span<const Example> dataset,
                                           std::span<const Prediction> predictions);

/// One row per skill tag (sorted), then the pairs hypernyms+counting,
/// hypernyms+sizes and hypernyms+age/year when some example carries both.
std::vector<BreakdownRow> skill_breakdown(std::span<const Example> dataset,
                                          std::span<const Prediction> predictions);

struct TemplateBreakdown {
  std::vector<BreakdownRow> templates;  // by template name (meta "template")
  double macro = 0;                     // mean of per-template accuracies
  Accuracy micro;                       // pooled
};

TemplateBreakdown template_breakdown(std::span<const Example> dataset,
                                     std::span<const Prediction> predictions);

}  // namespace kbr
