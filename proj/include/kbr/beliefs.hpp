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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kbr/counting.hpp"
#include "kbr/example.hpp"
#include "kbr/kb.hpp"

namespace kbr {

/// What the simulated believer holds about one fact. `confidence` is the
/// probability it assigns to the fact's KB truth, so a belief is wrong
/// exactly when confidence < 0.5.
struct Belief {
  bool truth = true;     // KB (or dataset) truth
  bool believed = true;  // what the believer takes to be the truth
  double confidence = 1.0;

  bool wrong() const { return believed != truth; }
  double p_true() const { return truth ? confidence : 1.0 - confidence; }
};

class BeliefTable {
 public:
  /// Throws Error unless confidence is in [0,1] and agrees with `believed`.
  void set(const TripleKey& key, Belief belief);
  const Belief* find(const TripleKey& key) const;
  bool contains(const TripleKey& key) const { return find(key) != nullptr; }

  std::size_t size() const { return beliefs_.size(); }
  std::size_t wrong_count() const;
  /// Keys sorted lexicographically.
  std::vector<TripleKey> keys() const;
  /// Beliefs whose subject is `subject`, in key order.
  std::vector<std::pair<TripleKey, Belief>> about(const std::string& subject) const;

  /// canonical fact -> p_true, the counting-order input.
  ProbabilityMap probability_map() const;

  /// JSONL {"fact","truth","believed","confidence"}, sorted by fact.
  void write(std::ostream& out) const;
  static BeliefTable read(std::istream& in, std::string_view origin);
  static BeliefTable load(const std::filesystem::path& path);

 private:
  std::unordered_map<TripleKey, Belief> beliefs_;
  std::unordered_map<std::string, std::vector<TripleKey>> by_subject_;
};

/// Each fact's belief is flipped with probability `rate`; confidence is
/// 1 - u/2 for kept beliefs and u/2 for flipped ones, u uniform in [0,1).
/// Draws are keyed by the canonical fact, so a fact's belief does not depend
/// on which other facts share the table. Later duplicates of a key are
/// ignored. Throws Error for rate outside [0,1].
BeliefTable corrupt_beliefs(std::span<const Triple> facts, double rate, std::uint64_t seed);

/// KB triples plus every fact stated or withheld in `examples`, so any view
/// of them can be probed, including negated facts absent from the KB.
BeliefTable corrupt_beliefs(const KnowledgeBase& kb, double rate, std::uint64_t seed,
                            std::span<const Example> examples = {});

/// Withheld facts a believer fills in from its beliefs: hypernym-tagged
/// facts and counting member/quantity facts.
bool in_belief_scope(const Statement& s);

/// Context statements (raw ones dropped) followed by believed versions of
/// in-scope withheld facts not already stated in the context.
std::vector<Statement> believer_premises(const BeliefTable& beliefs, const Example& example);

/// Maps a verdict to 1 (True), 0 (False) or 0.5 (Unknown); a contradiction
/// among the premises also gives 0.5.
double score_premises(std::span<const Statement> premises, const Triple& hypothesis,
                      const PredicateRegistry& registry);

/// entail(context + believed versions of in-scope withheld facts) mapped to
/// 1 (True), 0 (False) or 0.5 (Unknown, contradiction, or a raw
/// hypothesis). Raw context statements are ignored; withheld facts already
/// stated in the context keep the context's version.
double believer_predict(const BeliefTable& beliefs, const Example& example,
                        const PredicateRegistry& registry);

}  // namespace kbr
